#pragma once

#include "tabml/dataset.hpp"
#include "tabml/types.hpp"

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace tabml {

/// A fitted classifier. Implementations are immutable after fitting and
/// `predict_distribution` is reentrant.
class Model {
public:
    virtual ~Model() = default;

    /// Probability per class level of the training schema; sums to 1.
    /// Throws SchemaMismatch when the instance width differs from the schema.
    virtual Vector predict_distribution(Instance x) const = 0;

    std::size_t predict(Instance x) const;

    std::size_t num_attributes() const noexcept { return attributes_.size(); }
    std::size_t num_classes() const noexcept { return attributes_[class_index_].num_levels(); }
    std::size_t class_index() const noexcept { return class_index_; }
    const std::vector<AttributeSpec>& attributes() const noexcept { return attributes_; }

protected:
    explicit Model(const Dataset& schema);

    void check_schema(Instance x) const;

    std::vector<AttributeSpec> attributes_;
    std::size_t class_index_ = 0;
    std::vector<std::size_t> predictors_;
};

/// Level index of a nominal value, or nullopt for values outside the declared levels.
std::optional<std::size_t> level_of(double value, std::size_t num_levels);

struct ForestParams {
    std::size_t n_trees = 100;
    /// 0 selects floor(log2(F)) + 1 for F predictors.
    std::size_t mtry = 0;
    /// 0 means unlimited.
    std::size_t max_depth = 0;
    std::size_t min_split = 2;
    /// 0 selects the training set size.
    std::size_t bootstrap_size = 0;
    /// When false every tree sees the training rows once, in order, and has no out-of-bag rows.
    bool bootstrap = true;
};

struct SmoParams {
    double C = 1.0;
    double tolerance = 1e-3;
    /// Consecutive passes (n iterations each) without progress before the solver stops.
    std::size_t max_passes = 10;
};

struct NaiveBayesParams {
    double variance_floor = 1e-9;
};

enum class LeafStrategy { NaiveBayesAdaptive, NaiveBayes, MajorityClass };

struct HoeffdingParams {
    double delta = 1e-7;
    std::size_t grace_period = 200;
    double tie_threshold = 0.05;
    LeafStrategy leaf_strategy = LeafStrategy::NaiveBayesAdaptive;
    double variance_floor = 1e-9;
};

struct LwlParams {
    /// 0 means all training instances.
    std::size_t neighbors = 0;
};

enum class Algorithm { RandomForest, Svm, NaiveBayes, HoeffdingTree, Lwl };

std::string_view to_string(Algorithm a) noexcept;
/// Accepts the short names rf, svm, nb, ht, lwl.
std::optional<Algorithm> parse_algorithm(std::string_view name) noexcept;

using ModelParams = std::variant<ForestParams, SmoParams, NaiveBayesParams, HoeffdingParams, LwlParams>;

struct ModelSpec {
    std::string name;
    ModelParams params;

    Algorithm algorithm() const noexcept;
    static ModelSpec defaults(std::string name, Algorithm algorithm);
};

std::unique_ptr<Model> fit(const ModelSpec& spec, const Dataset& train, Seed seed);

}  // namespace tabml
