#include "tabml/hoeffding_tree.hpp"

#include "tabml/error.hpp"
#include "tabml/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tabml {

namespace {

constexpr std::size_t kNumericCandidates = 10;
constexpr double kMinBranchFraction = 0.01;

double entropy(const Eigen::Ref<const Vector>& counts) {
    const double total = counts.sum();
    if (total <= 0) return 0.0;
    double h = 0.0;
    for (Eigen::Index c = 0; c < counts.size(); ++c) {
        if (counts[c] > 0) {
            const double p = counts[c] / total;
            h -= p * std::log2(p);
        }
    }
    return h;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// At least two branches must each carry kMinBranchFraction of the weight.
bool balanced_enough(const Eigen::MatrixXd& branches) {
    const Vector weights = branches.rowwise().sum();
    const double total = weights.sum();
    return (weights.array() > kMinBranchFraction * total).count() >= 2;
}

Vector normalized_or_uniform(const Vector& counts) {
    const double total = counts.sum();
    if (total <= 0) return Vector::Constant(counts.size(), 1.0 / static_cast<double>(counts.size()));
    return counts / total;
}

}  // namespace

double hoeffding_bound(double range, double delta, double n) {
    if (!(range > 0) || !(delta > 0 && delta < 1) || !(n >= 1)) {
        throw Error(ErrorKind::InvalidArgument, "hoeffding_bound needs R > 0, 0 < delta < 1, n >= 1");
    }
    return std::sqrt(range * range * std::log(1.0 / delta) / (2.0 * n));
}

double information_gain(const Vector& parent, const Eigen::MatrixXd& branches) {
    const double total = parent.sum();
    if (total <= 0) return 0.0;
    double remainder = 0.0;
    for (Eigen::Index b = 0; b < branches.rows(); ++b) {
        const Vector row = branches.row(b).transpose();
        remainder += row.sum() / total * entropy(row);
    }
    return entropy(parent) - remainder;
}

HoeffdingTree::HoeffdingTree(const Dataset& schema, const HoeffdingParams& params) : Model(schema), params_(params) {
    if (!(params.delta > 0 && params.delta < 1)) throw Error(ErrorKind::InvalidArgument, "delta must lie in (0, 1)");
    if (params.grace_period == 0) throw Error(ErrorKind::InvalidArgument, "grace_period must be at least 1");
    if (params.tie_threshold < 0) throw Error(ErrorKind::InvalidArgument, "tie_threshold must be non-negative");
    Node root;
    root.stats = NaiveBayesEstimator(attributes_, class_index_, params_.variance_floor);
    root.initial_distribution = Vector::Constant(static_cast<Eigen::Index>(num_classes()), 1.0 / static_cast<double>(num_classes()));
    nodes_.push_back(std::move(root));
}

std::size_t HoeffdingTree::leaf_for(Instance x) const {
    std::size_t id = 0;
    while (nodes_[id].attribute >= 0) {
        const auto& node = nodes_[id];
        const double v = x[node.attribute];
        if (node.nominal) {
            const auto level = level_of(v, node.children.size());
            id = static_cast<std::size_t>(level ? node.children[*level] : node.fallback_child);
        } else {
            id = static_cast<std::size_t>(node.children[v <= node.threshold ? 0 : 1]);
        }
    }
    return id;
}

bool HoeffdingTree::choose_naive_bayes(const Node& leaf) const {
    switch (params_.leaf_strategy) {
        case LeafStrategy::NaiveBayes: return true;
        case LeafStrategy::MajorityClass: return false;
        case LeafStrategy::NaiveBayesAdaptive: return !(leaf.majority_correct > leaf.naive_bayes_correct);
    }
    return true;
}

Vector HoeffdingTree::leaf_prediction(const Node& leaf, Instance x) const {
    if (leaf.stats.total() == 0) return leaf.initial_distribution;
    if (choose_naive_bayes(leaf)) return leaf.stats.posterior(x);
    return normalized_or_uniform(leaf.stats.class_counts());
}

void HoeffdingTree::learn(Instance x, std::size_t label) {
    check_schema(x);
    if (label >= num_classes()) throw Error(ErrorKind::SchemaMismatch, "label outside the class levels");
    const auto id = leaf_for(x);
    {
        auto& leaf = nodes_[id];
        if (leaf.stats.total() > 0) {
            if (argmax(leaf.stats.class_counts()) == label) leaf.majority_correct += 1.0;
            if (argmax(leaf.stats.posterior(x)) == label) leaf.naive_bayes_correct += 1.0;
        }
        leaf.stats.add(x, label);
        if (leaf.stats.total() - leaf.weight_at_last_check < static_cast<double>(params_.grace_period)) return;
        leaf.weight_at_last_check = leaf.stats.total();
    }
    attempt_split(id);
}

HoeffdingTree::Suggestion HoeffdingTree::best_nominal(const Node& leaf, std::size_t column) const {
    Suggestion s;
    s.attribute = static_cast<int>(column);
    s.nominal = true;
    s.branches = leaf.stats.level_counts(column).transpose();
    s.merit = balanced_enough(s.branches) ? information_gain(leaf.stats.class_counts(), s.branches)
                                          : -std::numeric_limits<double>::infinity();
    return s;
}

// Candidate thresholds are evenly spaced inside the observed range; per-class
// mass below a threshold comes from that class's Gaussian summary.
HoeffdingTree::Suggestion HoeffdingTree::best_numeric(const Node& leaf, std::size_t column) const {
    Suggestion best;
    best.merit = -std::numeric_limits<double>::infinity();
    const auto& summary = leaf.stats.numeric_summary(column);
    const auto C = summary.count.size();
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (Eigen::Index c = 0; c < C; ++c) {
        if (summary.count[c] > 0) {
            lo = std::min(lo, summary.min[c]);
            hi = std::max(hi, summary.max[c]);
        }
    }
    if (!(hi > lo)) return best;

    for (std::size_t k = 1; k <= kNumericCandidates; ++k) {
        const double t = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(kNumericCandidates + 1);
        Eigen::MatrixXd branches = Eigen::MatrixXd::Zero(2, C);
        for (Eigen::Index c = 0; c < C; ++c) {
            const double n = summary.count[c];
            if (n <= 0) continue;
            double left;
            if (t < summary.min[c]) {
                left = 0.0;
            } else if (t >= summary.max[c]) {
                left = n;
            } else {
                const double sd = std::sqrt(leaf.stats.variance(column, static_cast<std::size_t>(c)));
                left = n * normal_cdf((t - summary.mean[c]) / sd);
            }
            branches(0, c) = left;
            branches(1, c) = n - left;
        }
        if (!balanced_enough(branches)) continue;
        const double merit = information_gain(leaf.stats.class_counts(), branches);
        if (merit > best.merit) {
            best.attribute = static_cast<int>(column);
            best.nominal = false;
            best.threshold = t;
            best.merit = merit;
            best.branches = std::move(branches);
        }
    }
    return best;
}

void HoeffdingTree::attempt_split(std::size_t leaf_id) {
    const Node& leaf = nodes_[leaf_id];
    if ((leaf.stats.class_counts().array() > 0).count() < 2) return;

    // The null split (no split, merit 0) always competes.
    Suggestion best;
    Suggestion second;
    for (const auto j : predictors_) {
        auto s = attributes_[j].is_nominal() ? best_nominal(leaf, j) : best_numeric(leaf, j);
        if (s.attribute < 0 || !std::isfinite(s.merit)) continue;
        if (s.merit > best.merit) {
            second = std::move(best);
            best = std::move(s);
        } else if (s.merit > second.merit) {
            second = std::move(s);
        }
    }
    if (best.attribute < 0 || best.merit <= 0) return;

    const double range = std::log2(static_cast<double>(std::max<std::size_t>(num_classes(), 2)));
    const double epsilon = hoeffding_bound(range, params_.delta, leaf.stats.total());
    if (!(best.merit - second.merit > epsilon || epsilon < params_.tie_threshold)) return;

    std::vector<int> children;
    Eigen::Index heaviest = 0;
    for (Eigen::Index b = 0; b < best.branches.rows(); ++b) {
        if (best.branches.row(b).sum() > best.branches.row(heaviest).sum()) heaviest = b;
        Node child;
        child.stats = NaiveBayesEstimator(attributes_, class_index_, params_.variance_floor);
        child.initial_distribution = normalized_or_uniform(best.branches.row(b).transpose());
        children.push_back(static_cast<int>(nodes_.size()));
        nodes_.push_back(std::move(child));
    }
    Node& split = nodes_[leaf_id];
    split.attribute = best.attribute;
    split.nominal = best.nominal;
    split.threshold = best.threshold;
    split.fallback_child = children[static_cast<std::size_t>(heaviest)];
    split.children = std::move(children);
    split.stats = NaiveBayesEstimator();
}

Vector HoeffdingTree::predict_distribution(Instance x) const {
    check_schema(x);
    return leaf_prediction(nodes_[leaf_for(x)], x);
}

bool HoeffdingTree::leaf_uses_naive_bayes(Instance x) const {
    const auto& leaf = nodes_[leaf_for(x)];
    return leaf.stats.total() > 0 && choose_naive_bayes(leaf);
}

std::size_t HoeffdingTree::num_splits() const {
    return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.attribute >= 0; }));
}

HoeffdingTree train_hoeffding_tree(const Dataset& train, const HoeffdingParams& params, Seed /*seed*/) {
    if (train.num_instances() == 0) throw Error(ErrorKind::EmptyTrainingSet, "Hoeffding tree needs at least one instance");
    HoeffdingTree tree(train, params);
    for (std::size_t i = 0; i < train.num_instances(); ++i) tree.learn(train.row(i), train.label(i));
    return tree;
}

}  // namespace tabml
