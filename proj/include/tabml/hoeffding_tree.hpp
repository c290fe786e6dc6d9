#pragma once

#include "tabml/classifier.hpp"
#include "tabml/naive_bayes.hpp"

#include <vector>

namespace tabml {

/// epsilon = sqrt(R^2 ln(1/delta) / (2n)).
double hoeffding_bound(double range, double delta, double n);

/// Information gain of splitting `parent` class counts into `branches`
/// (one row per branch, one column per class).
double information_gain(const Vector& parent, const Eigen::MatrixXd& branches);

/// Very Fast Decision Tree trained in one pass over the instances in dataset order.
class HoeffdingTree final : public Model {
public:
    struct Node {
        int attribute = -1;
        bool nominal = false;
        double threshold = 0.0;
        std::vector<int> children;
        /// Child taken for nominal levels not declared in the schema.
        int fallback_child = -1;

        // leaf state
        NaiveBayesEstimator stats;
        Vector initial_distribution;
        double weight_at_last_check = 0.0;
        double majority_correct = 0.0;
        double naive_bayes_correct = 0.0;
    };

    HoeffdingTree(const Dataset& schema, const HoeffdingParams& params);

    void learn(Instance x, std::size_t label);

    Vector predict_distribution(Instance x) const override;

    std::size_t num_splits() const;
    std::size_t num_nodes() const noexcept { return nodes_.size(); }
    const Node& node(std::size_t id) const { return nodes_.at(id); }
    /// True when the leaf reached by x currently answers with its naive Bayes posterior.
    bool leaf_uses_naive_bayes(Instance x) const;

private:
    struct Suggestion {
        int attribute = -1;
        bool nominal = false;
        double threshold = 0.0;
        double merit = 0.0;
        Eigen::MatrixXd branches;
    };

    std::size_t leaf_for(Instance x) const;
    Vector leaf_prediction(const Node& leaf, Instance x) const;
    bool choose_naive_bayes(const Node& leaf) const;
    void attempt_split(std::size_t leaf_id);
    Suggestion best_nominal(const Node& leaf, std::size_t column) const;
    Suggestion best_numeric(const Node& leaf, std::size_t column) const;

    HoeffdingParams params_;
    std::vector<Node> nodes_;
};

HoeffdingTree train_hoeffding_tree(const Dataset& train, const HoeffdingParams& params = {}, Seed seed = 0);

}  // namespace tabml
