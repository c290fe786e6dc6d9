#pragma once

#include "tabml/classifier.hpp"

#include <atomic>
#include <vector>

namespace tabml {

/// Weighted one-level decision stump. Nominal splits test `value == level`,
/// numeric splits `value <= threshold`; chosen by weighted entropy reduction.
struct DecisionStump {
    int attribute = -1;
    bool nominal = false;
    double split_value = 0.0;
    /// Laplace-smoothed class distributions: [0] branch taken by matching instances, [1] the rest.
    /// With no split both entries hold the whole-set distribution.
    Vector branch[2];

    static DecisionStump fit(const Matrix& data, const std::vector<std::size_t>& labels, const Vector& weights,
                             const std::vector<AttributeSpec>& attributes, const std::vector<std::size_t>& predictors,
                             std::size_t num_classes);

    std::size_t branch_of(Instance x) const;
    const Vector& distribution(Instance x) const { return branch[branch_of(x)]; }
};

/// Lazy locally weighted learner: keeps the normalized training set, and per
/// query weights every stored instance by max(0, 1 - d/d_k) before fitting a stump.
class LwlModel final : public Model {
public:
    LwlModel(const Dataset& train, const LwlParams& params);
    LwlModel(const LwlModel& other);

    Vector predict_distribution(Instance x) const override;

    /// Kernel weights of the stored instances for query x (before rescaling).
    Vector weights_for(Instance x) const;
    /// Distance between a query and stored instance i in normalized space.
    double distance(Instance x, std::size_t i) const;

    /// Number of distance evaluations performed so far.
    std::size_t distance_evaluations() const noexcept { return distance_evaluations_.load(); }
    std::size_t num_stored() const noexcept { return static_cast<std::size_t>(stored_.rows()); }

private:
    RowVector normalize(Instance x) const;
    double squared_distance(const RowVector& query, Eigen::Index i) const;

    LwlParams params_;
    Matrix stored_;
    std::vector<std::size_t> labels_;
    RowVector min_;
    RowVector range_;
    mutable std::atomic<std::size_t> distance_evaluations_{0};
};

LwlModel train_lwl(const Dataset& train, const LwlParams& params = {});

}  // namespace tabml
