#pragma once

#include "tabml/classifier.hpp"

#include <memory>
#include <vector>

namespace tabml {

/// Incremental sufficient statistics for a naive Bayes posterior: class
/// counts, per-class level counts for nominal predictors, and per-class
/// running mean/variance (plus range) for numeric predictors. Shared by the
/// standalone naive Bayes model and Hoeffding tree leaves.
class NaiveBayesEstimator {
public:
    struct NumericSummary {
        Vector count;
        Vector mean;
        Vector m2;
        Vector min;
        Vector max;
    };

    NaiveBayesEstimator() = default;
    NaiveBayesEstimator(const std::vector<AttributeSpec>& attributes, std::size_t class_index, double variance_floor);

    void add(Instance x, std::size_t label);

    /// Posterior over the schema's classes. Classes with no observations get
    /// probability 0; priors are add-1 smoothed over the observed classes and
    /// nominal likelihoods add-1 smoothed over the attribute's levels.
    /// With no observations at all the result is uniform.
    Vector posterior(Instance x) const;

    const Vector& class_counts() const noexcept { return class_counts_; }
    double total() const noexcept { return total_; }
    std::size_t num_classes() const noexcept { return static_cast<std::size_t>(class_counts_.size()); }

    /// Per-class level counts (classes x levels) for nominal column j; empty for numeric columns.
    const Eigen::MatrixXd& level_counts(std::size_t column) const { return nominal_[column]; }
    const NumericSummary& numeric_summary(std::size_t column) const { return numeric_[column]; }
    /// Population variance of column j within class c, floored.
    double variance(std::size_t column, std::size_t c) const;

    const std::vector<std::size_t>& predictors() const noexcept { return predictors_; }
    bool is_nominal(std::size_t column) const { return num_levels_[column] > 0; }
    std::size_t num_levels(std::size_t column) const { return num_levels_[column]; }

private:
    std::vector<std::size_t> predictors_;
    std::vector<std::size_t> num_levels_;
    std::vector<Eigen::MatrixXd> nominal_;
    std::vector<NumericSummary> numeric_;
    Vector class_counts_;
    double total_ = 0.0;
    double variance_floor_ = 1e-9;
};

class NaiveBayesModel final : public Model {
public:
    NaiveBayesModel(const Dataset& train, const NaiveBayesParams& params);

    Vector predict_distribution(Instance x) const override;

    const NaiveBayesEstimator& estimator() const noexcept { return estimator_; }

private:
    NaiveBayesEstimator estimator_;
};

NaiveBayesModel train_naive_bayes(const Dataset& train, const NaiveBayesParams& params = {});

}  // namespace tabml
