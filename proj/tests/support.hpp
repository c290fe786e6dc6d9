#pragma once

#include "tabml/dataset.hpp"
#include "tabml/random.hpp"

#include <string>
#include <vector>

namespace support {

inline std::string fixture(const std::string& name) { return std::string(TABML_FIXTURE_DIR) + "/" + name; }

/// Class is the last attribute; rows carry one value per attribute.
inline tabml::Dataset make_dataset(std::vector<tabml::AttributeSpec> attributes, const std::vector<std::vector<double>>& rows,
                                   std::string name = "toy") {
    tabml::Matrix values(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(attributes.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < attributes.size(); ++j) values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
    const auto class_index = attributes.size() - 1;
    return tabml::Dataset(std::move(name), std::move(attributes), class_index, std::move(values));
}

inline tabml::AttributeSpec class_attribute(std::size_t levels) {
    std::vector<std::string> names;
    for (std::size_t c = 0; c < levels; ++c) names.push_back("c" + std::to_string(c));
    return tabml::AttributeSpec::nominal("class", names);
}

/// Balanced classes, uniform numeric noise predictors.
inline tabml::Dataset noise_dataset(std::size_t n, std::size_t predictors, std::size_t classes, tabml::Seed seed) {
    tabml::Rng rng(seed);
    std::vector<tabml::AttributeSpec> attrs;
    for (std::size_t j = 0; j < predictors; ++j) attrs.push_back(tabml::AttributeSpec::numeric("n" + std::to_string(j + 1)));
    attrs.push_back(class_attribute(classes));
    std::vector<std::size_t> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = i % classes;
    rng.shuffle(std::span<std::size_t>(labels));
    std::vector<std::vector<double>> rows(n, std::vector<double>(predictors + 1));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < predictors; ++j) rows[i][j] = rng.uniform();
        rows[i][predictors] = static_cast<double>(labels[i]);
    }
    return make_dataset(std::move(attrs), rows, "noise");
}

/// `signals` binary copies of a balanced binary class followed by `noise` uniform predictors.
inline tabml::Dataset planted_dataset(std::size_t n, std::size_t signals, std::size_t noise, tabml::Seed seed) {
    tabml::Rng rng(seed);
    std::vector<tabml::AttributeSpec> attrs;
    for (std::size_t j = 0; j < signals; ++j) attrs.push_back(tabml::AttributeSpec::binary("s" + std::to_string(j + 1)));
    for (std::size_t j = 0; j < noise; ++j) attrs.push_back(tabml::AttributeSpec::numeric("n" + std::to_string(j + 1)));
    attrs.push_back(class_attribute(2));
    std::vector<std::size_t> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = i % 2;
    rng.shuffle(std::span<std::size_t>(labels));
    std::vector<std::vector<double>> rows(n, std::vector<double>(signals + noise + 1));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < signals; ++j) rows[i][j] = static_cast<double>(labels[i]);
        for (std::size_t j = 0; j < noise; ++j) rows[i][signals + j] = rng.uniform();
        rows[i][signals + noise] = static_cast<double>(labels[i]);
    }
    return make_dataset(std::move(attrs), rows, "planted");
}

}  // namespace support
