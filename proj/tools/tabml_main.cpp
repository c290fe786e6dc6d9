// Command-line driver: run experiments, Boruta-only selection, and report re-rendering.

#include "tabml/boruta.hpp"
#include "tabml/config.hpp"
#include "tabml/error.hpp"
#include "tabml/parallel.hpp"
#include "tabml/report.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace {

using tabml::Error;
using tabml::ErrorKind;

enum ExitCode { kOk = 0, kConfig = 1, kData = 2, kRuntime = 3 };

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::ConfigError: return kConfig;
        case ErrorKind::MalformedRow:
        case ErrorKind::MissingValue:
        case ErrorKind::EmptyDataset:
        case ErrorKind::UnknownClassColumn:
        case ErrorKind::UnsupportedArffFeature:
        case ErrorKind::MalformedHeader:
        case ErrorKind::IoError:
        case ErrorKind::KTooLarge:
        case ErrorKind::SchemaError: return kData;
        default: return kRuntime;
    }
}

struct GlobalOptions {
    std::optional<std::uint64_t> seed;
    std::size_t threads = 0;
    std::string output_dir;
};

tabml::ExperimentConfig prepare(const std::string& config_path, const GlobalOptions& g) {
    auto cfg = tabml::load_config(config_path);
    if (g.seed) tabml::override_seed(cfg, *g.seed);
    if (!g.output_dir.empty()) cfg.output.directory = g.output_dir;
    return cfg;
}

void ensure_directory(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorKind::IoError, "cannot create output directory " + dir.string() + ": " + ec.message());
}

int cmd_run(const std::string& config_path, const GlobalOptions& g) {
    const auto cfg = prepare(config_path, g);
    const auto ds = tabml::load_dataset(cfg.dataset);
    const auto report = tabml::run_experiment(ds, cfg.models, cfg.protocol, cfg.selection);

    ensure_directory(cfg.output.directory);
    std::vector<tabml::OutputFile> files;
    if (cfg.output.json) files.push_back({cfg.output.directory / "report.json", tabml::dump(tabml::to_json(report))});
    if (cfg.output.markdown) files.push_back({cfg.output.directory / "report.md", tabml::render_markdown(report)});
    if (cfg.output.csv) files.push_back({cfg.output.directory / "report.csv", tabml::render_csv(report)});
    tabml::write_files_atomic(files);

    if (!report.evaluation_2_error.empty()) std::cerr << "evaluation 2 skipped: " << report.evaluation_2_error << "\n";
    for (const auto& f : files) std::cout << "wrote " << f.path.string() << "\n";
    return kOk;
}

int cmd_select(const std::string& config_path, const GlobalOptions& g) {
    const auto cfg = prepare(config_path, g);
    if (!cfg.selection) throw Error(ErrorKind::ConfigError, "selection: missing (select needs a selection block)");
    const auto ds = tabml::load_dataset(cfg.dataset);
    const auto result = tabml::boruta_run(ds, cfg.selection->boruta);
    const auto summary = tabml::summarize(ds, result, cfg.selection->include_tentative);

    ensure_directory(cfg.output.directory);
    tabml::write_files_atomic({{cfg.output.directory / "selection.json", tabml::dump(tabml::to_json(summary))}});

    char line[128];
    std::snprintf(line, sizeof line, "confirmed: %zu / %zu (reduction %.2f%%)", summary.confirmed, summary.predictors, summary.reduction_percent);
    std::cout << line << "\n";
    return kOk;
}

int cmd_report(const std::string& json_path, const std::string& format) {
    std::ifstream in(json_path);
    if (!in) throw Error(ErrorKind::IoError, "cannot open " + json_path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorKind::SchemaError, "$: " + std::string(e.what()));
    }
    const auto report = tabml::report_from_json(j);
    std::cout << (format == "csv" ? tabml::render_csv(report) : tabml::render_markdown(report));
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tabular classifier benchmark with Boruta feature selection"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions g;
    app.add_option("--seed", g.seed, "Override the seed in the config");
    app.add_option("--threads", g.threads, "Worker thread cap (default: hardware concurrency)")->check(CLI::PositiveNumber);
    app.add_option("--output-dir", g.output_dir, "Override the output directory");

    std::string config_path;
    std::string json_path;
    std::string format = "md";
    auto* run = app.add_subcommand("run", "Evaluate the configured models, with optional Boruta selection");
    run->add_option("config", config_path, "Experiment config (JSON)")->required();
    auto* select = app.add_subcommand("select", "Run Boruta selection only");
    select->add_option("config", config_path, "Experiment config (JSON)")->required();
    auto* report = app.add_subcommand("report", "Re-render a saved report.json");
    report->add_option("json", json_path, "report.json produced by run")->required();
    report->add_option("--format", format, "md or csv")->check(CLI::IsMember({"md", "csv"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfig;
    }

    tabml::set_thread_limit(g.threads ? g.threads : std::max(1u, std::thread::hardware_concurrency()));
    try {
        if (*run) return cmd_run(config_path, g);
        if (*select) return cmd_select(config_path, g);
        return cmd_report(json_path, format);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntime;
    }
}
