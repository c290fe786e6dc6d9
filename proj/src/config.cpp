#include "tabml/config.hpp"

#include "tabml/error.hpp"

#include <fstream>
#include <set>

namespace tabml {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& field, const std::string& what) {
    throw Error(ErrorKind::ConfigError, field + ": " + what);
}

class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) config_error(path_, "expected an object");
    }

    std::string path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
    bool has(const char* key) const { return j_.contains(key); }
    const json& raw(const char* key) const {
        used_.insert(key);
        return j_.at(key);
    }

    void count(const char* key, std::size_t& out, std::size_t minimum = 0) const {
        if (!has(key)) return;
        const auto& v = raw(key);
        if (!v.is_number_integer() || v.get<long long>() < static_cast<long long>(minimum)) {
            config_error(path(key), "expected an integer >= " + std::to_string(minimum));
        }
        out = v.get<std::size_t>();
    }

    void seed(const char* key, Seed& out) const {
        if (!has(key)) return;
        const auto& v = raw(key);
        if (!v.is_number_unsigned()) config_error(path(key), "expected a non-negative integer");
        out = v.get<Seed>();
    }

    void real(const char* key, double& out, double lo, double hi, bool open_lo = true) const {
        if (!has(key)) return;
        const auto& v = raw(key);
        if (!v.is_number()) config_error(path(key), "expected a number");
        const double x = v.get<double>();
        if ((open_lo ? !(x > lo) : !(x >= lo)) || !(x < hi)) {
            config_error(path(key), "value " + v.dump() + " out of range");
        }
        out = x;
    }

    void flag(const char* key, bool& out) const {
        if (!has(key)) return;
        const auto& v = raw(key);
        if (!v.is_boolean()) config_error(path(key), "expected true or false");
        out = v.get<bool>();
    }

    std::string text(const char* key) const {
        if (!has(key)) config_error(path(key), "missing");
        const auto& v = raw(key);
        if (!v.is_string() || v.get<std::string>().empty()) config_error(path(key), "expected a non-empty string");
        return v.get<std::string>();
    }

    /// Rejects keys that were never read, so typos surface as errors.
    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!used_.count(it.key())) config_error(path(it.key()), "unknown field");
        }
    }

private:
    const json& j_;
    std::string path_;
    mutable std::set<std::string> used_;
};

constexpr double kInf = std::numeric_limits<double>::infinity();

void read_forest(const Section& s, ForestParams& p) {
    s.count("n_trees", p.n_trees, 1);
    s.count("mtry", p.mtry);
    s.count("max_depth", p.max_depth);
    s.count("min_split", p.min_split, 2);
    s.count("bootstrap_size", p.bootstrap_size);
    s.flag("bootstrap", p.bootstrap);
}

ModelParams read_params(const Section& s, Algorithm algorithm) {
    switch (algorithm) {
        case Algorithm::RandomForest: {
            ForestParams p;
            read_forest(s, p);
            return p;
        }
        case Algorithm::Svm: {
            SmoParams p;
            s.real("C", p.C, 0.0, kInf);
            s.real("tolerance", p.tolerance, 0.0, kInf);
            s.count("max_passes", p.max_passes, 1);
            return p;
        }
        case Algorithm::NaiveBayes: {
            NaiveBayesParams p;
            s.real("variance_floor", p.variance_floor, 0.0, kInf);
            return p;
        }
        case Algorithm::HoeffdingTree: {
            HoeffdingParams p;
            s.real("delta", p.delta, 0.0, 1.0);
            s.count("grace_period", p.grace_period, 1);
            s.real("tie_threshold", p.tie_threshold, 0.0, kInf, false);
            s.real("variance_floor", p.variance_floor, 0.0, kInf);
            if (s.has("leaf_strategy")) {
                const auto v = s.text("leaf_strategy");
                if (v == "nb_adaptive") p.leaf_strategy = LeafStrategy::NaiveBayesAdaptive;
                else if (v == "nb") p.leaf_strategy = LeafStrategy::NaiveBayes;
                else if (v == "majority") p.leaf_strategy = LeafStrategy::MajorityClass;
                else config_error(s.path("leaf_strategy"), "expected nb_adaptive, nb or majority");
            }
            return p;
        }
        case Algorithm::Lwl: {
            LwlParams p;
            if (s.has("neighbors") && s.raw("neighbors").is_string()) {
                if (s.raw("neighbors").get<std::string>() != "all") config_error(s.path("neighbors"), "expected a count or \"all\"");
            } else {
                s.count("neighbors", p.neighbors, 1);
            }
            return p;
        }
    }
    return ForestParams{};
}

}  // namespace

ExperimentConfig parse_config(const json& j, const std::filesystem::path& base) {
    ExperimentConfig cfg;
    const Section root(j, "");

    if (!root.has("dataset")) config_error("dataset", "missing");
    {
        const Section d(root.raw("dataset"), "dataset");
        const auto path = std::filesystem::path(d.text("path"));
        cfg.dataset.path = path.is_absolute() ? path : base / path;
        if (d.has("format")) {
            const auto f = d.text("format");
            if (f == "csv") cfg.dataset.format = DataFormat::Csv;
            else if (f == "arff") cfg.dataset.format = DataFormat::Arff;
            else config_error("dataset.format", "expected csv or arff");
        }
        if (d.has("class_column")) {
            const auto& c = d.raw("class_column");
            if (c.is_string()) cfg.dataset.class_column = c.get<std::string>();
            else if (c.is_number_unsigned()) cfg.dataset.class_column = c.get<std::size_t>();
            else config_error("dataset.class_column", "expected a column name or index");
        }
        d.flag("has_header", cfg.dataset.has_header);
        d.finish();
    }

    if (root.has("protocol")) {
        const Section p(root.raw("protocol"), "protocol");
        p.count("k", cfg.protocol.k, 2);
        p.count("repeats", cfg.protocol.repeats, 1);
        p.count("ttest_repeats", cfg.protocol.ttest_repeats, 1);
        p.seed("seed", cfg.protocol.seed);
        p.real("alpha", cfg.protocol.alpha, 0.0, 1.0);
        p.finish();
    }

    if (!root.has("models")) config_error("models", "missing");
    const auto& models = root.raw("models");
    if (!models.is_array() || models.empty()) config_error("models", "expected a non-empty list");
    std::set<std::string> names;
    for (std::size_t i = 0; i < models.size(); ++i) {
        const Section m(models[i], "models[" + std::to_string(i) + "]");
        const auto name = m.text("name");
        if (!names.insert(name).second) config_error(m.path("name"), "duplicate model name '" + name + "'");
        const auto alg_name = m.text("algorithm");
        const auto alg = parse_algorithm(alg_name);
        if (!alg) config_error(m.path("algorithm"), "unknown algorithm '" + alg_name + "' (expected rf, svm, nb, ht or lwl)");
        ModelSpec spec = ModelSpec::defaults(name, *alg);
        if (m.has("params")) {
            const Section params(m.raw("params"), m.path("params"));
            spec.params = read_params(params, *alg);
            params.finish();
        }
        m.finish();
        cfg.models.push_back(std::move(spec));
    }

    if (root.has("selection")) {
        const Section s(root.raw("selection"), "selection");
        SelectionOptions sel;
        sel.boruta.seed = cfg.protocol.seed;
        s.count("max_runs", sel.boruta.max_runs, 7);
        s.real("p_value", sel.boruta.p_value, 0.0, 1.0);
        s.seed("seed", sel.boruta.seed);
        s.flag("include_tentative", sel.include_tentative);
        if (s.has("forest")) {
            const Section f(s.raw("forest"), "selection.forest");
            read_forest(f, sel.boruta.forest);
            f.finish();
        }
        s.finish();
        cfg.selection = sel;
    }

    if (root.has("output")) {
        const Section o(root.raw("output"), "output");
        if (o.has("directory")) {
            const auto dir = std::filesystem::path(o.text("directory"));
            cfg.output.directory = dir.is_absolute() ? dir : base / dir;
        } else {
            cfg.output.directory = base;
        }
        if (o.has("formats")) {
            const auto& f = o.raw("formats");
            if (!f.is_array()) config_error("output.formats", "expected a list");
            cfg.output.json = cfg.output.markdown = cfg.output.csv = false;
            for (std::size_t i = 0; i < f.size(); ++i) {
                const auto v = f[i].is_string() ? f[i].get<std::string>() : std::string();
                if (v == "json") cfg.output.json = true;
                else if (v == "markdown" || v == "md") cfg.output.markdown = true;
                else if (v == "csv") cfg.output.csv = true;
                else config_error("output.formats[" + std::to_string(i) + "]", "expected json, markdown or csv");
            }
        }
        o.finish();
    } else {
        cfg.output.directory = base;
    }
    root.finish();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw Error(ErrorKind::ConfigError, "cannot open config file " + file.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::ConfigError, file.string() + ": " + e.what());
    }
    return parse_config(j, file.has_parent_path() ? file.parent_path() : std::filesystem::path("."));
}

void override_seed(ExperimentConfig& config, Seed seed) {
    config.protocol.seed = seed;
    if (config.selection) config.selection->boruta.seed = seed;
}

Dataset load_dataset(const DatasetConfig& config) {
    if (config.format == DataFormat::Arff) {
        ArffOptions options;
        if (const auto* name = std::get_if<std::string>(&config.class_column)) options.class_attribute = *name;
        if (std::holds_alternative<std::size_t>(config.class_column)) {
            throw Error(ErrorKind::InvalidArgument, "ARFF class columns are selected by name");
        }
        return load_arff_file(config.path.string(), options);
    }
    CsvOptions options;
    options.has_header = config.has_header;
    options.class_column = config.class_column;
    options.name = config.path.stem().string();
    return load_csv_file(config.path.string(), options);
}

}  // namespace tabml
