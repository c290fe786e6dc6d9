#pragma once

#include "tabml/classifier.hpp"
#include "tabml/random.hpp"

#include <vector>

namespace tabml {

/// CART classification tree grown on Gini impurity. Nominal splits are
/// multiway on levels, numeric splits binary at midpoints.
class DecisionTree {
public:
    struct Node {
        /// Split column, or -1 for a leaf.
        int attribute = -1;
        bool nominal = false;
        double threshold = 0.0;
        /// Numeric: {left (<= threshold), right}. Nominal: one child per level.
        std::vector<int> children;
        /// Class counts of the training rows reaching this node.
        Vector counts;
    };

    struct GrowOptions {
        std::size_t mtry = 0;
        std::size_t max_depth = 0;
        std::size_t min_split = 2;
    };

    /// Grows a tree on `rows` of `data` (duplicates allowed, as in a bootstrap sample).
    static DecisionTree grow(const Dataset& data, const std::vector<std::size_t>& rows, const GrowOptions& options, Rng& rng);

    /// Class proportions at the reached leaf. An empty child or an unknown
    /// nominal level stops at the current node.
    Vector predict_distribution(Instance x) const;

    const std::vector<Node>& nodes() const noexcept { return nodes_; }
    std::size_t num_leaves() const;
    /// Columns used by at least one split, ascending.
    std::vector<std::size_t> split_attributes() const;

private:
    std::vector<Node> nodes_;
};

class RandomForest final : public Model {
public:
    RandomForest(const Dataset& schema, std::vector<DecisionTree> trees, std::vector<std::vector<std::size_t>> oob_rows);

    /// Mean of the per-tree leaf distributions.
    Vector predict_distribution(Instance x) const override;

    const std::vector<DecisionTree>& trees() const noexcept { return trees_; }
    /// Training rows left out of each tree's bootstrap sample.
    const std::vector<std::vector<std::size_t>>& oob_rows() const noexcept { return oob_rows_; }

    /// Accuracy of out-of-bag votes over rows with at least one OOB tree; NaN if none.
    double oob_accuracy(const Dataset& train) const;

private:
    std::vector<DecisionTree> trees_;
    std::vector<std::vector<std::size_t>> oob_rows_;
};

/// floor(log2(F)) + 1.
std::size_t default_mtry(std::size_t num_predictors);

RandomForest train_random_forest(const Dataset& train, const ForestParams& params, Seed seed);

}  // namespace tabml
