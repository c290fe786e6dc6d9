#pragma once

#include "tabml/evaluation.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace tabml {

inline constexpr const char* kReportSchemaVersion = "1.0.0";

nlohmann::ordered_json to_json(const ExperimentReport& report);
nlohmann::ordered_json to_json(const SelectionSummary& selection);

/// Throws SchemaError naming the offending JSON path.
ExperimentReport report_from_json(const nlohmann::json& j);

/// Two-space indented JSON with a trailing newline.
std::string dump(const nlohmann::ordered_json& j);

std::string render_markdown(const ExperimentReport& report);
std::string render_csv(const ExperimentReport& report);

struct OutputFile {
    std::filesystem::path path;
    std::string content;
};

/// Writes every file under a temporary name, then renames them into place.
/// On failure no target file is created or replaced.
void write_files_atomic(const std::vector<OutputFile>& files);

}  // namespace tabml
