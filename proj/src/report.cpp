#include "tabml/report.hpp"

#include "tabml/error.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <unistd.h>

namespace tabml {

using ojson = nlohmann::ordered_json;
using nlohmann::json;

namespace {

// JSON has no infinities; they travel as strings, NaN as null.
ojson number(double v) {
    if (std::isnan(v)) return nullptr;
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

ojson section_json(const EvaluationSection& s) {
    ojson models = ojson::array();
    for (const auto& m : s.models) {
        models.push_back({{"name", m.name},
                          {"algorithm", std::string(to_string(m.algorithm))},
                          {"accuracy", number(m.accuracy)},
                          {"rmse", number(m.rmse)},
                          {"weighted_auc", number(m.weighted_auc)}});
    }
    return {{"num_predictors", s.num_predictors}, {"models", std::move(models)}};
}

void append_comparisons(ojson& out, const EvaluationSection& s, int evaluation) {
    for (const auto& c : s.comparisons) {
        out.push_back({{"evaluation", evaluation},
                       {"metric", std::string(to_string(c.metric))},
                       {"model_a", c.model_a},
                       {"model_b", c.model_b},
                       {"t_statistic", number(c.result.t_statistic)},
                       {"degrees_of_freedom", c.result.degrees_of_freedom},
                       {"p_value", number(c.result.p_value)},
                       {"verdict", std::string(to_string(c.result.verdict))}});
    }
}

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
    throw Error(ErrorKind::SchemaError, path + ": " + what);
}

const json& field(const json& obj, const char* key, const std::string& path) {
    if (!obj.is_object()) schema_error(path, "expected an object");
    const auto it = obj.find(key);
    if (it == obj.end()) schema_error(path + "." + key, "missing");
    return *it;
}

double read_number(const json& v, const std::string& path) {
    if (v.is_number()) return v.get<double>();
    if (v.is_null()) return std::numeric_limits<double>::quiet_NaN();
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
    }
    schema_error(path, "expected a number");
}

std::uint64_t read_count(const json& v, const std::string& path) {
    if (!v.is_number_unsigned()) schema_error(path, "expected a non-negative integer");
    return v.get<std::uint64_t>();
}

std::string read_text(const json& v, const std::string& path) {
    if (!v.is_string()) schema_error(path, "expected a string");
    return v.get<std::string>();
}

const json& read_array(const json& v, const std::string& path) {
    if (!v.is_array()) schema_error(path, "expected an array");
    return v;
}

double num_field(const json& o, const char* key, const std::string& path) {
    return read_number(field(o, key, path), path + "." + key);
}
std::size_t count_field(const json& o, const char* key, const std::string& path) {
    return static_cast<std::size_t>(read_count(field(o, key, path), path + "." + key));
}
std::string text_field(const json& o, const char* key, const std::string& path) {
    return read_text(field(o, key, path), path + "." + key);
}

template <class T, class Parse>
T enum_field(const json& o, const char* key, const std::string& path, Parse parse) {
    const auto text = text_field(o, key, path);
    const auto value = parse(text);
    if (!value) schema_error(path + "." + key, "unknown value '" + text + "'");
    return *value;
}

std::optional<FeatureDecision> parse_decision(std::string_view s) {
    for (const auto d : {FeatureDecision::Tentative, FeatureDecision::Confirmed, FeatureDecision::Rejected}) {
        if (to_string(d) == s) return d;
    }
    return std::nullopt;
}

EvaluationSection section_from_json(const json& j, const std::string& path) {
    EvaluationSection s;
    s.num_predictors = count_field(j, "num_predictors", path);
    const auto& models = read_array(field(j, "models", path), path + ".models");
    for (std::size_t i = 0; i < models.size(); ++i) {
        const auto p = path + ".models[" + std::to_string(i) + "]";
        const auto& m = models[i];
        s.models.push_back({text_field(m, "name", p), enum_field<Algorithm>(m, "algorithm", p, parse_algorithm),
                            num_field(m, "accuracy", p), num_field(m, "rmse", p), num_field(m, "weighted_auc", p)});
    }
    if (s.models.empty()) schema_error(path + ".models", "expected at least one model");
    return s;
}

std::string fixed(double v, int decimals) {
    if (!std::isfinite(v)) return "n/a";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

std::string percent(double v) { return std::isfinite(v) ? fixed(100.0 * v, 2) + " %" : "n/a"; }

std::string p_value_text(double p) {
    if (p < 0.001) return "p < 0.001";
    return "p = " + fixed(p, 3);
}

std::string table_row(const std::vector<std::string>& cells) {
    std::string row = "|";
    for (const auto& c : cells) row += " " + c + " |";
    return row + "\n";
}

std::string table_rule(std::size_t columns) {
    std::string row = "|";
    for (std::size_t i = 0; i < columns; ++i) row += i == 0 ? " --- |" : " ---: |";
    return row + "\n";
}

void render_section(std::ostringstream& out, const EvaluationSection& s) {
    std::vector<std::string> header{"Metric"};
    for (const auto& m : s.models) header.push_back(m.name);
    out << table_row(header) << table_rule(header.size());

    std::vector<std::string> acc{"Accuracy"}, rmse{"RMSE"}, roc{"ROC"};
    for (const auto& m : s.models) {
        acc.push_back(percent(m.accuracy));
        rmse.push_back(fixed(m.rmse, 2));
        roc.push_back(fixed(m.weighted_auc, 2));
    }
    out << table_row(acc) << table_row(rmse) << table_row(roc);

    for (const auto metric : kAllMetrics) {
        out << "\nSignificance, " << to_string(metric) << " (row vs column):\n\n";
        std::vector<std::string> names{""};
        for (const auto& m : s.models) names.push_back(m.name);
        out << table_row(names) << table_rule(names.size());
        for (const auto& row : s.models) {
            std::vector<std::string> cells{row.name};
            for (const auto& col : s.models) {
                std::string cell = "";
                for (const auto& c : s.comparisons) {
                    if (c.metric != metric) continue;
                    const bool forward = c.model_a == row.name && c.model_b == col.name;
                    const bool backward = c.model_b == row.name && c.model_a == col.name;
                    if (!forward && !backward) continue;
                    const auto v = c.result.verdict;
                    if (v == Verdict::NoSignificantDifference) {
                        cell = "tie (" + p_value_text(c.result.p_value) + ")";
                    } else {
                        const bool row_better = (v == Verdict::ABetter) == forward;
                        cell = std::string(row_better ? "better" : "worse") + " (" + p_value_text(c.result.p_value) + ")";
                    }
                }
                cells.push_back(row.name == col.name ? "-" : cell);
            }
            out << table_row(cells);
        }
    }
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (const char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
}

std::string full_precision(double v) {
    if (std::isnan(v)) return "";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

ojson to_json(const SelectionSummary& s) {
    ojson attributes = ojson::array();
    for (const auto& a : s.attributes) {
        attributes.push_back({{"name", a.name},
                              {"decision", std::string(to_string(a.decision))},
                              {"hits", a.hits},
                              {"z_score", number(a.z_score)}});
    }
    return {{"runs_completed", s.runs_completed},
            {"predictors", s.predictors},
            {"confirmed", s.confirmed},
            {"tentative", s.tentative},
            {"rejected", s.rejected},
            {"include_tentative", s.include_tentative},
            {"reduction_percent", number(s.reduction_percent)},
            {"attributes", std::move(attributes)}};
}

ojson to_json(const ExperimentReport& r) {
    ojson j;
    j["schema_version"] = kReportSchemaVersion;
    j["dataset_summary"] = {{"name", r.dataset.name},
                            {"instances", r.dataset.instances},
                            {"predictors", r.dataset.predictors},
                            {"class_levels", r.dataset.class_levels},
                            {"class_counts", r.dataset.class_counts}};
    j["protocol"] = {{"k", r.protocol.k},
                     {"repeats", r.protocol.repeats},
                     {"ttest_repeats", r.protocol.ttest_repeats},
                     {"seed", r.protocol.seed},
                     {"alpha", r.protocol.alpha}};
    j["evaluation_1"] = section_json(r.evaluation_1);
    if (r.evaluation_2) j["evaluation_2"] = section_json(*r.evaluation_2);
    if (!r.evaluation_2_error.empty()) j["evaluation_2_error"] = r.evaluation_2_error;
    if (r.selection) j["selection"] = to_json(*r.selection);
    ojson comparisons = ojson::array();
    append_comparisons(comparisons, r.evaluation_1, 1);
    if (r.evaluation_2) append_comparisons(comparisons, *r.evaluation_2, 2);
    j["comparisons"] = std::move(comparisons);
    return j;
}

ExperimentReport report_from_json(const json& j) {
    const std::string root = "$";
    ExperimentReport r;
    const auto version = text_field(j, "schema_version", root);
    if (version != kReportSchemaVersion) {
        schema_error("$.schema_version", "unsupported version '" + version + "' (expected " + kReportSchemaVersion + ")");
    }

    const auto& d = field(j, "dataset_summary", root);
    const std::string dp = "$.dataset_summary";
    r.dataset.name = text_field(d, "name", dp);
    r.dataset.instances = count_field(d, "instances", dp);
    r.dataset.predictors = count_field(d, "predictors", dp);
    const auto& levels = read_array(field(d, "class_levels", dp), dp + ".class_levels");
    for (std::size_t i = 0; i < levels.size(); ++i) {
        r.dataset.class_levels.push_back(read_text(levels[i], dp + ".class_levels[" + std::to_string(i) + "]"));
    }
    const auto& counts = read_array(field(d, "class_counts", dp), dp + ".class_counts");
    for (std::size_t i = 0; i < counts.size(); ++i) {
        r.dataset.class_counts.push_back(static_cast<std::size_t>(read_count(counts[i], dp + ".class_counts[" + std::to_string(i) + "]")));
    }

    const auto& p = field(j, "protocol", root);
    r.protocol.k = count_field(p, "k", "$.protocol");
    r.protocol.repeats = count_field(p, "repeats", "$.protocol");
    r.protocol.ttest_repeats = count_field(p, "ttest_repeats", "$.protocol");
    r.protocol.seed = read_count(field(p, "seed", "$.protocol"), "$.protocol.seed");
    r.protocol.alpha = num_field(p, "alpha", "$.protocol");

    r.evaluation_1 = section_from_json(field(j, "evaluation_1", root), "$.evaluation_1");
    if (j.contains("evaluation_2")) r.evaluation_2 = section_from_json(j["evaluation_2"], "$.evaluation_2");
    if (j.contains("evaluation_2_error")) r.evaluation_2_error = read_text(j["evaluation_2_error"], "$.evaluation_2_error");

    if (j.contains("selection")) {
        const auto& s = j["selection"];
        const std::string sp = "$.selection";
        SelectionSummary sel;
        sel.runs_completed = count_field(s, "runs_completed", sp);
        sel.predictors = count_field(s, "predictors", sp);
        sel.confirmed = count_field(s, "confirmed", sp);
        sel.tentative = count_field(s, "tentative", sp);
        sel.rejected = count_field(s, "rejected", sp);
        const auto& flag = field(s, "include_tentative", sp);
        if (!flag.is_boolean()) schema_error(sp + ".include_tentative", "expected a boolean");
        sel.include_tentative = flag.get<bool>();
        sel.reduction_percent = num_field(s, "reduction_percent", sp);
        const auto& attrs = read_array(field(s, "attributes", sp), sp + ".attributes");
        for (std::size_t i = 0; i < attrs.size(); ++i) {
            const auto ap = sp + ".attributes[" + std::to_string(i) + "]";
            sel.attributes.push_back({text_field(attrs[i], "name", ap), enum_field<FeatureDecision>(attrs[i], "decision", ap, parse_decision),
                                      count_field(attrs[i], "hits", ap), num_field(attrs[i], "z_score", ap)});
        }
        r.selection = std::move(sel);
    }

    const auto& comparisons = read_array(field(j, "comparisons", root), "$.comparisons");
    for (std::size_t i = 0; i < comparisons.size(); ++i) {
        const auto cp = "$.comparisons[" + std::to_string(i) + "]";
        const auto& c = comparisons[i];
        const auto evaluation = count_field(c, "evaluation", cp);
        EvaluationSection* target = evaluation == 1 ? &r.evaluation_1 : (evaluation == 2 && r.evaluation_2 ? &*r.evaluation_2 : nullptr);
        if (!target) schema_error(cp + ".evaluation", "refers to a missing evaluation section");
        PairwiseComparison pc;
        pc.metric = enum_field<Metric>(c, "metric", cp, parse_metric);
        pc.model_a = text_field(c, "model_a", cp);
        pc.model_b = text_field(c, "model_b", cp);
        pc.result.t_statistic = num_field(c, "t_statistic", cp);
        pc.result.degrees_of_freedom = count_field(c, "degrees_of_freedom", cp);
        pc.result.p_value = num_field(c, "p_value", cp);
        pc.result.verdict = enum_field<Verdict>(c, "verdict", cp, parse_verdict);
        target->comparisons.push_back(std::move(pc));
    }
    return r;
}

std::string dump(const ojson& j) { return j.dump(2) + "\n"; }

std::string render_markdown(const ExperimentReport& r) {
    std::ostringstream out;
    const auto& d = r.dataset;
    out << "# Experiment report: " << d.name << "\n\n";
    out << "Dataset: " << d.instances << " instances, " << d.predictors << " predictors, " << d.class_levels.size() << " classes.\n\n";
    out << "Protocol: " << r.protocol.k << "-fold stratified cross-validation, " << r.protocol.repeats
        << (r.protocol.repeats == 1 ? " repeat" : " repeats") << ", seed " << r.protocol.seed << ". Significance: corrected paired t-test over "
        << r.protocol.ttest_repeats << "x" << r.protocol.k << " folds at alpha " << fixed(r.protocol.alpha, 2) << ".\n\n";

    out << "## Evaluation 1: all predictors (" << r.evaluation_1.num_predictors << ")\n\n";
    render_section(out, r.evaluation_1);

    if (r.selection) {
        const auto& s = *r.selection;
        out << "\n## Feature selection (Boruta)\n\n";
        out << "confirmed: " << s.confirmed << " / " << s.predictors << " (reduction " << fixed(s.reduction_percent, 2) << "%)";
        out << "; tentative " << s.tentative << ", rejected " << s.rejected << " after " << s.runs_completed << " runs";
        out << (s.include_tentative ? "; tentative attributes kept.\n\n" : ".\n\n");
        out << table_row({"Attribute", "Decision", "Hits", "Z"}) << table_rule(4);
        for (const auto& a : s.attributes) {
            out << table_row({a.name, std::string(to_string(a.decision)), std::to_string(a.hits), fixed(a.z_score, 2)});
        }
    }

    if (r.evaluation_2) {
        out << "\n## Evaluation 2: selected predictors (" << r.evaluation_2->num_predictors << ")\n\n";
        render_section(out, *r.evaluation_2);
    } else if (!r.evaluation_2_error.empty()) {
        out << "\n## Evaluation 2\n\nNot run: " << r.evaluation_2_error << "\n";
    }
    return out.str();
}

std::string render_csv(const ExperimentReport& r) {
    std::ostringstream out;
    out << "evaluation,metric";
    for (const auto& m : r.evaluation_1.models) out << "," << csv_field(m.name);
    out << "\n";
    auto section = [&](const EvaluationSection& s, int index) {
        for (const auto metric : kAllMetrics) {
            out << index << "," << to_string(metric);
            for (const auto& m : s.models) {
                const double v = metric == Metric::Accuracy ? m.accuracy : metric == Metric::Rmse ? m.rmse : m.weighted_auc;
                out << "," << full_precision(v);
            }
            out << "\n";
        }
    };
    section(r.evaluation_1, 1);
    if (r.evaluation_2) section(*r.evaluation_2, 2);
    return out.str();
}

void write_files_atomic(const std::vector<OutputFile>& files) {
    std::vector<std::filesystem::path> temps;
    auto cleanup = [&] {
        std::error_code ec;
        for (const auto& t : temps) std::filesystem::remove(t, ec);
    };
    for (const auto& f : files) {
        auto tmp = f.path;
        tmp += ".tmp." + std::to_string(::getpid());
        temps.push_back(tmp);
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        os << f.content;
        os.close();
        if (!os) {
            cleanup();
            throw Error(ErrorKind::IoError, "cannot write " + f.path.string());
        }
    }
    for (std::size_t i = 0; i < files.size(); ++i) {
        std::error_code ec;
        std::filesystem::rename(temps[i], files[i].path, ec);
        if (ec) {
            cleanup();
            throw Error(ErrorKind::IoError, "cannot move " + temps[i].string() + " into place: " + ec.message());
        }
    }
}

}  // namespace tabml
