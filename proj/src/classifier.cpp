#include "tabml/classifier.hpp"

#include "tabml/error.hpp"
#include "tabml/hoeffding_tree.hpp"
#include "tabml/lwl.hpp"
#include "tabml/metrics.hpp"
#include "tabml/naive_bayes.hpp"
#include "tabml/random_forest.hpp"
#include "tabml/svm.hpp"

#include <cmath>

namespace tabml {

Model::Model(const Dataset& schema)
    : attributes_(schema.attributes()), class_index_(schema.class_index()), predictors_(schema.predictor_indices()) {}

void Model::check_schema(Instance x) const {
    if (static_cast<std::size_t>(x.size()) != attributes_.size()) {
        throw Error(ErrorKind::SchemaMismatch, "instance has " + std::to_string(x.size()) + " values, schema has " +
                                                   std::to_string(attributes_.size()));
    }
}

std::size_t Model::predict(Instance x) const { return argmax(predict_distribution(x)); }

std::optional<std::size_t> level_of(double value, std::size_t num_levels) {
    if (!(value >= 0.0) || value != std::floor(value) || value >= static_cast<double>(num_levels)) return std::nullopt;
    return static_cast<std::size_t>(value);
}

std::string_view to_string(Algorithm a) noexcept {
    switch (a) {
        case Algorithm::RandomForest: return "rf";
        case Algorithm::Svm: return "svm";
        case Algorithm::NaiveBayes: return "nb";
        case Algorithm::HoeffdingTree: return "ht";
        case Algorithm::Lwl: return "lwl";
    }
    return "?";
}

std::optional<Algorithm> parse_algorithm(std::string_view name) noexcept {
    if (name == "rf") return Algorithm::RandomForest;
    if (name == "svm") return Algorithm::Svm;
    if (name == "nb") return Algorithm::NaiveBayes;
    if (name == "ht") return Algorithm::HoeffdingTree;
    if (name == "lwl") return Algorithm::Lwl;
    return std::nullopt;
}

Algorithm ModelSpec::algorithm() const noexcept {
    switch (params.index()) {
        case 0: return Algorithm::RandomForest;
        case 1: return Algorithm::Svm;
        case 2: return Algorithm::NaiveBayes;
        case 3: return Algorithm::HoeffdingTree;
        default: return Algorithm::Lwl;
    }
}

ModelSpec ModelSpec::defaults(std::string name, Algorithm algorithm) {
    switch (algorithm) {
        case Algorithm::RandomForest: return {std::move(name), ForestParams{}};
        case Algorithm::Svm: return {std::move(name), SmoParams{}};
        case Algorithm::NaiveBayes: return {std::move(name), NaiveBayesParams{}};
        case Algorithm::HoeffdingTree: return {std::move(name), HoeffdingParams{}};
        case Algorithm::Lwl: return {std::move(name), LwlParams{}};
    }
    return {std::move(name), NaiveBayesParams{}};
}

std::unique_ptr<Model> fit(const ModelSpec& spec, const Dataset& train, Seed seed) {
    return std::visit(
        [&](const auto& p) -> std::unique_ptr<Model> {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, ForestParams>) {
                return std::make_unique<RandomForest>(train_random_forest(train, p, seed));
            } else if constexpr (std::is_same_v<P, SmoParams>) {
                return std::make_unique<SvmModel>(train_svm(train, p, seed));
            } else if constexpr (std::is_same_v<P, NaiveBayesParams>) {
                return std::make_unique<NaiveBayesModel>(train_naive_bayes(train, p));
            } else if constexpr (std::is_same_v<P, HoeffdingParams>) {
                return std::make_unique<HoeffdingTree>(train_hoeffding_tree(train, p, seed));
            } else {
                return std::make_unique<LwlModel>(train_lwl(train, p));
            }
        },
        spec.params);
}

}  // namespace tabml
