#pragma once

#include "tabml/dataset.hpp"
#include "tabml/evaluation.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace tabml {

enum class DataFormat { Csv, Arff };

struct DatasetConfig {
    /// Resolved against the directory holding the config file.
    std::filesystem::path path;
    DataFormat format = DataFormat::Csv;
    /// Column name, or a zero-based index written as a number. Empty means the last column.
    std::variant<std::monostate, std::string, std::size_t> class_column;
    bool has_header = true;
};

struct OutputConfig {
    std::filesystem::path directory = ".";
    bool json = true;
    bool markdown = true;
    bool csv = false;
};

struct ExperimentConfig {
    DatasetConfig dataset;
    ExperimentProtocol protocol;
    std::vector<ModelSpec> models;
    std::optional<SelectionOptions> selection;
    OutputConfig output;
};

/// Parses and validates a config document. Errors are ConfigError and name the field.
ExperimentConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_directory);
ExperimentConfig load_config(const std::filesystem::path& file);

/// Replaces the protocol seed and the selection seed.
void override_seed(ExperimentConfig& config, Seed seed);

Dataset load_dataset(const DatasetConfig& config);

}  // namespace tabml
