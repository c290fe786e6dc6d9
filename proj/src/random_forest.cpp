#include "tabml/random_forest.hpp"

#include "tabml/error.hpp"
#include "tabml/metrics.hpp"
#include "tabml/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace tabml {

namespace {

constexpr double kMinGain = 1e-12;

struct SplitCandidate {
    int attribute = -1;
    bool nominal = false;
    double threshold = 0.0;
    double gain = 0.0;
};

double sum_squares(const Vector& counts) { return counts.squaredNorm(); }

class TreeGrower {
public:
    TreeGrower(const Dataset& data, const DecisionTree::GrowOptions& options, Rng& rng, std::vector<DecisionTree::Node>& nodes)
        : data_(data), options_(options), rng_(rng), nodes_(nodes), predictors_(data.predictor_indices()),
          num_classes_(static_cast<Eigen::Index>(data.num_classes())) {}

    int grow(const std::vector<std::size_t>& rows, std::size_t depth) {
        const int id = static_cast<int>(nodes_.size());
        nodes_.emplace_back();
        nodes_[id].counts = class_counts(rows);
        const double n = static_cast<double>(rows.size());
        const auto& counts = nodes_[id].counts;

        const bool pure = (counts.array() > 0).count() <= 1;
        const bool depth_limited = options_.max_depth != 0 && depth >= options_.max_depth;
        if (pure || rows.size() < options_.min_split || depth_limited) return id;

        const auto best = find_split(rows, counts, n);
        if (best.attribute < 0) return id;

        const auto column = static_cast<Eigen::Index>(best.attribute);
        std::vector<std::vector<std::size_t>> parts;
        if (best.nominal) {
            parts.resize(data_.attribute(static_cast<std::size_t>(best.attribute)).num_levels());
            for (const auto r : rows) parts[static_cast<std::size_t>(data_.values()(static_cast<Eigen::Index>(r), column))].push_back(r);
        } else {
            parts.resize(2);
            for (const auto r : rows) parts[data_.values()(static_cast<Eigen::Index>(r), column) <= best.threshold ? 0 : 1].push_back(r);
        }

        nodes_[id].attribute = best.attribute;
        nodes_[id].nominal = best.nominal;
        nodes_[id].threshold = best.threshold;
        std::vector<int> children;
        for (const auto& part : parts) {
            if (part.empty()) {
                children.push_back(static_cast<int>(nodes_.size()));
                nodes_.emplace_back();
                nodes_.back().counts = Vector::Zero(num_classes_);
            } else {
                children.push_back(grow(part, depth + 1));
            }
        }
        nodes_[id].children = std::move(children);
        return id;
    }

private:
    Vector class_counts(const std::vector<std::size_t>& rows) const {
        Vector counts = Vector::Zero(num_classes_);
        for (const auto r : rows) counts[static_cast<Eigen::Index>(data_.label(r))] += 1.0;
        return counts;
    }

    // Examines predictors in random order. After `mtry` of them, stops as soon
    // as some split has positive gain; otherwise keeps drawing until one does
    // or every predictor has been tried.
    SplitCandidate find_split(const std::vector<std::size_t>& rows, const Vector& counts, double n) {
        const double parent_score = sum_squares(counts) / n;
        const auto order = rng_.permutation(predictors_.size());
        SplitCandidate best;
        std::size_t examined = 0;
        for (const auto k : order) {
            const auto j = predictors_[k];
            const auto candidate = data_.attribute(j).is_nominal() ? nominal_split(rows, j, n, parent_score)
                                                                     : numeric_split(rows, j, n, parent_score);
            if (candidate.gain > kMinGain && candidate.gain > best.gain) best = candidate;
            ++examined;
            if (examined >= options_.mtry && best.attribute >= 0) break;
        }
        return best;
    }

    SplitCandidate nominal_split(const std::vector<std::size_t>& rows, std::size_t j, double n, double parent_score) const {
        const auto levels = static_cast<Eigen::Index>(data_.attribute(j).num_levels());
        Eigen::MatrixXd table = Eigen::MatrixXd::Zero(levels, num_classes_);
        const auto column = static_cast<Eigen::Index>(j);
        for (const auto r : rows) {
            table(static_cast<Eigen::Index>(data_.values()(static_cast<Eigen::Index>(r), column)),
                  static_cast<Eigen::Index>(data_.label(r))) += 1.0;
        }
        double score = 0.0;
        for (Eigen::Index v = 0; v < levels; ++v) {
            const double nv = table.row(v).sum();
            if (nv > 0) score += table.row(v).squaredNorm() / nv;
        }
        return {static_cast<int>(j), true, 0.0, (score - parent_score) / n};
    }

    SplitCandidate numeric_split(const std::vector<std::size_t>& rows, std::size_t j, double n, double parent_score) const {
        const auto column = static_cast<Eigen::Index>(j);
        std::vector<std::pair<double, std::size_t>> pairs;
        pairs.reserve(rows.size());
        for (const auto r : rows) pairs.emplace_back(data_.values()(static_cast<Eigen::Index>(r), column), data_.label(r));
        std::sort(pairs.begin(), pairs.end());

        SplitCandidate best{static_cast<int>(j), false, 0.0, 0.0};
        Vector left = Vector::Zero(num_classes_);
        Vector right = Vector::Zero(num_classes_);
        for (const auto& [v, label] : pairs) right[static_cast<Eigen::Index>(label)] += 1.0;
        double n_left = 0.0;
        for (std::size_t i = 0; i + 1 < pairs.size(); ++i) {
            const auto c = static_cast<Eigen::Index>(pairs[i].second);
            left[c] += 1.0;
            right[c] -= 1.0;
            n_left += 1.0;
            if (pairs[i].first == pairs[i + 1].first) continue;
            const double score = left.squaredNorm() / n_left + right.squaredNorm() / (n - n_left);
            const double gain = (score - parent_score) / n;
            if (gain > best.gain) {
                best.gain = gain;
                best.threshold = (pairs[i].first + pairs[i + 1].first) / 2.0;
            }
        }
        return best;
    }

    const Dataset& data_;
    const DecisionTree::GrowOptions& options_;
    Rng& rng_;
    std::vector<DecisionTree::Node>& nodes_;
    std::vector<std::size_t> predictors_;
    Eigen::Index num_classes_;
};

Vector normalized(const Vector& counts) {
    const double total = counts.sum();
    if (total <= 0) return Vector::Constant(counts.size(), 1.0 / static_cast<double>(counts.size()));
    return counts / total;
}

}  // namespace

DecisionTree DecisionTree::grow(const Dataset& data, const std::vector<std::size_t>& rows, const GrowOptions& options, Rng& rng) {
    if (rows.empty()) throw Error(ErrorKind::EmptyTrainingSet, "cannot grow a tree on zero rows");
    GrowOptions opts = options;
    if (opts.mtry == 0) opts.mtry = default_mtry(data.num_predictors());
    DecisionTree tree;
    TreeGrower(data, opts, rng, tree.nodes_).grow(rows, 0);
    return tree;
}

Vector DecisionTree::predict_distribution(Instance x) const {
    std::size_t id = 0;
    while (nodes_[id].attribute >= 0) {
        const auto& node = nodes_[id];
        const double v = x[node.attribute];
        std::size_t next;
        if (node.nominal) {
            const auto level = level_of(v, node.children.size());
            if (!level) break;
            next = static_cast<std::size_t>(node.children[*level]);
        } else {
            next = static_cast<std::size_t>(node.children[v <= node.threshold ? 0 : 1]);
        }
        if (nodes_[next].counts.sum() <= 0) break;
        id = next;
    }
    return normalized(nodes_[id].counts);
}

std::size_t DecisionTree::num_leaves() const {
    return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.attribute < 0; }));
}

std::vector<std::size_t> DecisionTree::split_attributes() const {
    std::set<std::size_t> used;
    for (const auto& n : nodes_) {
        if (n.attribute >= 0) used.insert(static_cast<std::size_t>(n.attribute));
    }
    return {used.begin(), used.end()};
}

RandomForest::RandomForest(const Dataset& schema, std::vector<DecisionTree> trees, std::vector<std::vector<std::size_t>> oob_rows)
    : Model(schema), trees_(std::move(trees)), oob_rows_(std::move(oob_rows)) {}

Vector RandomForest::predict_distribution(Instance x) const {
    check_schema(x);
    Vector sum = Vector::Zero(static_cast<Eigen::Index>(num_classes()));
    for (const auto& t : trees_) sum += t.predict_distribution(x);
    return sum / static_cast<double>(trees_.size());
}

double RandomForest::oob_accuracy(const Dataset& train) const {
    const auto n = train.num_instances();
    const auto C = static_cast<Eigen::Index>(num_classes());
    std::vector<Vector> votes(n, Vector::Zero(C));
    std::vector<bool> seen(n, false);
    for (std::size_t t = 0; t < trees_.size(); ++t) {
        for (const auto r : oob_rows_[t]) {
            votes[r] += trees_[t].predict_distribution(train.row(r));
            seen[r] = true;
        }
    }
    std::size_t scored = 0;
    std::size_t correct = 0;
    for (std::size_t r = 0; r < n; ++r) {
        if (!seen[r]) continue;
        ++scored;
        if (argmax(votes[r]) == train.label(r)) ++correct;
    }
    if (scored == 0) return std::numeric_limits<double>::quiet_NaN();
    return static_cast<double>(correct) / static_cast<double>(scored);
}

std::size_t default_mtry(std::size_t num_predictors) {
    if (num_predictors == 0) return 1;
    return static_cast<std::size_t>(std::floor(std::log2(static_cast<double>(num_predictors)))) + 1;
}

RandomForest train_random_forest(const Dataset& train, const ForestParams& params, Seed seed) {
    const auto n = train.num_instances();
    if (n == 0) throw Error(ErrorKind::EmptyTrainingSet, "random forest needs at least one instance");
    if (params.n_trees == 0) throw Error(ErrorKind::InvalidArgument, "n_trees must be at least 1");
    const auto F = train.num_predictors();
    if (params.mtry > F) throw Error(ErrorKind::InvalidArgument, "mtry exceeds the predictor count");

    DecisionTree::GrowOptions options{params.mtry == 0 ? default_mtry(F) : params.mtry, params.max_depth, params.min_split};
    options.mtry = std::min(options.mtry, std::max<std::size_t>(F, 1));
    const auto sample_size = params.bootstrap_size == 0 ? n : params.bootstrap_size;

    std::vector<DecisionTree> trees(params.n_trees);
    std::vector<std::vector<std::size_t>> oob(params.n_trees);
    parallel_for(params.n_trees, [&](std::size_t t) {
        Rng rng(derive_seed(seed, t));
        std::vector<std::size_t> rows;
        if (params.bootstrap) {
            std::vector<bool> in_bag(n, false);
            rows.reserve(sample_size);
            for (std::size_t i = 0; i < sample_size; ++i) {
                const auto r = rng.uniform_index(n);
                rows.push_back(r);
                in_bag[r] = true;
            }
            for (std::size_t r = 0; r < n; ++r) {
                if (!in_bag[r]) oob[t].push_back(r);
            }
        } else {
            rows.resize(n);
            for (std::size_t r = 0; r < n; ++r) rows[r] = r;
        }
        trees[t] = DecisionTree::grow(train, rows, options, rng);
    });
    return RandomForest(train, std::move(trees), std::move(oob));
}

}  // namespace tabml
