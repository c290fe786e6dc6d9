#include "tabml/dataset.hpp"

#include "tabml/error.hpp"
#include "tabml/random.hpp"
#include "text.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace tabml {

AttributeSpec AttributeSpec::numeric(std::string name) {
    return {std::move(name), AttributeKind::Numeric, {}};
}

AttributeSpec AttributeSpec::binary(std::string name) {
    return {std::move(name), AttributeKind::Binary, {"0", "1"}};
}

AttributeSpec AttributeSpec::nominal(std::string name, std::vector<std::string> levels) {
    if (levels == std::vector<std::string>{"0", "1"}) return binary(std::move(name));
    return {std::move(name), AttributeKind::Nominal, std::move(levels)};
}

std::optional<std::size_t> AttributeSpec::level_index(const std::string& level) const {
    const auto it = std::find(levels.begin(), levels.end(), level);
    if (it == levels.end()) return std::nullopt;
    return static_cast<std::size_t>(it - levels.begin());
}

Dataset::Dataset(std::string name, std::vector<AttributeSpec> attributes, std::size_t class_index, Matrix values)
    : name_(std::move(name)), attributes_(std::move(attributes)), class_index_(class_index), values_(std::move(values)) {
    if (attributes_.empty()) throw Error(ErrorKind::InvalidArgument, "dataset has no attributes");
    if (class_index_ >= attributes_.size()) {
        throw Error(ErrorKind::UnknownClassColumn, "class index " + std::to_string(class_index_) + " out of range");
    }
    if (!attributes_[class_index_].is_nominal()) {
        throw Error(ErrorKind::InvalidArgument, "class attribute '" + attributes_[class_index_].name + "' is not nominal");
    }
    for (const auto& a : attributes_) {
        if (a.is_nominal()) {
            if (a.levels.empty()) throw Error(ErrorKind::InvalidArgument, "attribute '" + a.name + "' has no levels");
            std::set<std::string> unique(a.levels.begin(), a.levels.end());
            if (unique.size() != a.levels.size()) {
                throw Error(ErrorKind::InvalidArgument, "attribute '" + a.name + "' has duplicate levels");
            }
            if (a.kind == AttributeKind::Binary && a.levels != std::vector<std::string>{"0", "1"}) {
                throw Error(ErrorKind::InvalidArgument, "binary attribute '" + a.name + "' must have levels {0,1}");
            }
        }
    }
    if (static_cast<std::size_t>(values_.cols()) != attributes_.size()) {
        throw Error(ErrorKind::MalformedRow, "value matrix has " + std::to_string(values_.cols()) + " columns, schema has " +
                                                 std::to_string(attributes_.size()));
    }
    for (Eigen::Index i = 0; i < values_.rows(); ++i) {
        for (Eigen::Index j = 0; j < values_.cols(); ++j) {
            const double v = values_(i, j);
            const auto& a = attributes_[static_cast<std::size_t>(j)];
            if (!std::isfinite(v)) {
                throw Error(ErrorKind::MissingValue, "row " + std::to_string(i) + ", column '" + a.name + "'");
            }
            if (a.is_nominal() && (v < 0 || v != std::floor(v) || v >= static_cast<double>(a.num_levels()))) {
                throw Error(ErrorKind::InvalidArgument,
                            "row " + std::to_string(i) + ", column '" + a.name + "': value is not a declared level");
            }
        }
    }
}

std::vector<std::size_t> Dataset::predictor_indices() const {
    std::vector<std::size_t> out;
    out.reserve(num_predictors());
    for (std::size_t j = 0; j < attributes_.size(); ++j) {
        if (j != class_index_) out.push_back(j);
    }
    return out;
}

std::vector<std::size_t> Dataset::labels() const {
    std::vector<std::size_t> out(num_instances());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = label(i);
    return out;
}

std::vector<std::size_t> Dataset::class_counts() const {
    std::vector<std::size_t> counts(num_classes(), 0);
    for (std::size_t i = 0; i < num_instances(); ++i) ++counts[label(i)];
    return counts;
}

Dataset Dataset::select_rows(const std::vector<std::size_t>& rows) const {
    Matrix out(static_cast<Eigen::Index>(rows.size()), values_.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        out.row(static_cast<Eigen::Index>(r)) = values_.row(static_cast<Eigen::Index>(rows[r]));
    }
    Dataset ds;
    ds.name_ = name_;
    ds.attributes_ = attributes_;
    ds.class_index_ = class_index_;
    ds.values_ = std::move(out);
    return ds;
}

Dataset Dataset::select_columns(const std::vector<std::size_t>& columns) const {
    std::vector<AttributeSpec> attrs;
    std::optional<std::size_t> new_class;
    Matrix out(values_.rows(), static_cast<Eigen::Index>(columns.size()));
    for (std::size_t c = 0; c < columns.size(); ++c) {
        const auto j = columns[c];
        if (j >= attributes_.size()) throw Error(ErrorKind::InvalidArgument, "column index out of range");
        attrs.push_back(attributes_[j]);
        if (j == class_index_) new_class = c;
        out.col(static_cast<Eigen::Index>(c)) = values_.col(static_cast<Eigen::Index>(j));
    }
    if (!new_class) throw Error(ErrorKind::InvalidArgument, "column selection drops the class attribute");
    Dataset ds;
    ds.name_ = name_;
    ds.attributes_ = std::move(attrs);
    ds.class_index_ = *new_class;
    ds.values_ = std::move(out);
    return ds;
}

bool operator==(const Dataset& a, const Dataset& b) {
    return a.name_ == b.name_ && a.attributes_ == b.attributes_ && a.class_index_ == b.class_index_ &&
           a.values_.rows() == b.values_.rows() && a.values_.cols() == b.values_.cols() && a.values_ == b.values_;
}

namespace {

std::vector<std::string> sorted_levels(const std::vector<std::string>& observed) {
    std::vector<std::string> levels;
    std::set<std::string> seen;
    for (const auto& v : observed) {
        if (seen.insert(v).second) levels.push_back(v);
    }
    const bool all_numeric =
        std::all_of(levels.begin(), levels.end(), [](const std::string& s) { return detail::parse_number(s).has_value(); });
    if (all_numeric) {
        std::stable_sort(levels.begin(), levels.end(), [](const std::string& a, const std::string& b) {
            return *detail::parse_number(a) < *detail::parse_number(b);
        });
    } else {
        std::sort(levels.begin(), levels.end());
    }
    return levels;
}

}  // namespace

Dataset load_csv(std::istream& source, const CsvOptions& options) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_numbers;
    std::vector<std::string> header;
    std::string line;
    std::size_t line_no = 0;
    bool header_pending = options.has_header;
    while (std::getline(source, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (detail::trim(line).empty()) continue;
        auto fields = detail::split_fields(line);
        if (header_pending) {
            header = std::move(fields);
            header_pending = false;
            continue;
        }
        rows.push_back(std::move(fields));
        line_numbers.push_back(line_no);
    }
    if (options.has_header && header.empty()) throw Error(ErrorKind::EmptyDataset, "no header line");
    if (rows.empty()) throw Error(ErrorKind::EmptyDataset, "no data rows");

    const std::size_t width = options.has_header ? header.size() : rows.front().size();
    if (!options.has_header) {
        for (std::size_t j = 0; j < width; ++j) header.push_back("col" + std::to_string(j));
    }
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != width) {
            throw Error(ErrorKind::MalformedRow, "line " + std::to_string(line_numbers[r]) + " has " +
                                                     std::to_string(rows[r].size()) + " fields, expected " +
                                                     std::to_string(width));
        }
        for (std::size_t j = 0; j < width; ++j) {
            if (rows[r][j].empty() || rows[r][j] == "?") {
                throw Error(ErrorKind::MissingValue,
                            "row " + std::to_string(r + 1) + " (line " + std::to_string(line_numbers[r]) + "), column '" +
                                header[j] + "'");
            }
        }
    }

    std::size_t class_index = width - 1;
    if (const auto* name = std::get_if<std::string>(&options.class_column)) {
        if (!options.has_header) throw Error(ErrorKind::UnknownClassColumn, "class column by name requires a header");
        const auto it = std::find(header.begin(), header.end(), *name);
        if (it == header.end()) throw Error(ErrorKind::UnknownClassColumn, "no column named '" + *name + "'");
        class_index = static_cast<std::size_t>(it - header.begin());
    } else if (const auto* idx = std::get_if<std::size_t>(&options.class_column)) {
        if (*idx >= width) throw Error(ErrorKind::UnknownClassColumn, "class column index " + std::to_string(*idx) + " out of range");
        class_index = *idx;
    }

    std::vector<AttributeSpec> attrs;
    Matrix values(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
    for (std::size_t j = 0; j < width; ++j) {
        std::vector<std::string> column(rows.size());
        std::vector<std::optional<double>> parsed(rows.size());
        bool all_numeric = true;
        bool all_binary = true;
        for (std::size_t r = 0; r < rows.size(); ++r) {
            column[r] = rows[r][j];
            parsed[r] = detail::parse_number(column[r]);
            if (!parsed[r]) {
                all_numeric = false;
                all_binary = false;
            } else if (*parsed[r] != 0.0 && *parsed[r] != 1.0) {
                all_binary = false;
            }
        }

        auto kind = all_binary ? AttributeKind::Binary : all_numeric ? AttributeKind::Numeric : AttributeKind::Nominal;
        if (const auto it = options.kind_overrides.find(header[j]); it != options.kind_overrides.end()) {
            kind = it->second;
            if (kind == AttributeKind::Numeric && !all_numeric) {
                throw Error(ErrorKind::InvalidArgument, "column '" + header[j] + "' forced numeric but has non-numeric values");
            }
            if (kind == AttributeKind::Binary && !all_binary) {
                throw Error(ErrorKind::InvalidArgument, "column '" + header[j] + "' forced binary but has values outside {0,1}");
            }
        }
        if (j == class_index && kind == AttributeKind::Numeric) kind = AttributeKind::Nominal;

        const auto col = static_cast<Eigen::Index>(j);
        if (kind == AttributeKind::Binary) {
            attrs.push_back(AttributeSpec::binary(header[j]));
            for (std::size_t r = 0; r < rows.size(); ++r) values(static_cast<Eigen::Index>(r), col) = *parsed[r];
        } else if (kind == AttributeKind::Numeric) {
            attrs.push_back(AttributeSpec::numeric(header[j]));
            for (std::size_t r = 0; r < rows.size(); ++r) values(static_cast<Eigen::Index>(r), col) = *parsed[r];
        } else {
            auto spec = AttributeSpec::nominal(header[j], sorted_levels(column));
            for (std::size_t r = 0; r < rows.size(); ++r) {
                values(static_cast<Eigen::Index>(r), col) = static_cast<double>(*spec.level_index(column[r]));
            }
            attrs.push_back(std::move(spec));
        }
    }
    return Dataset(options.name, std::move(attrs), class_index, std::move(values));
}

Dataset load_csv_file(const std::string& path, const CsvOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::IoError, "cannot open '" + path + "'");
    return load_csv(in, options);
}

void write_csv(std::ostream& out, const Dataset& ds) {
    const auto& attrs = ds.attributes();
    for (std::size_t j = 0; j < attrs.size(); ++j) {
        if (j) out << ',';
        out << attrs[j].name;
    }
    out << '\n';
    for (std::size_t i = 0; i < ds.num_instances(); ++i) {
        for (std::size_t j = 0; j < attrs.size(); ++j) {
            if (j) out << ',';
            const double v = ds.values()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            if (attrs[j].is_nominal()) {
                out << attrs[j].levels[static_cast<std::size_t>(v)];
            } else {
                out << detail::format_number(v);
            }
        }
        out << '\n';
    }
}

std::size_t FoldPlan::fold_size(std::size_t fold) const {
    return static_cast<std::size_t>(std::count(assignments.begin(), assignments.end(), fold));
}

std::vector<std::size_t> FoldPlan::test_rows(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignments.size(); ++i) {
        if (assignments[i] == fold) out.push_back(i);
    }
    return out;
}

std::vector<std::size_t> FoldPlan::train_rows(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignments.size(); ++i) {
        if (assignments[i] != fold) out.push_back(i);
    }
    return out;
}

std::uint64_t FoldPlan::fingerprint() const {
    std::uint64_t h = mix_seed(k);
    for (const auto a : assignments) h = mix_seed(h ^ (a + 0x9e3779b97f4a7c15ULL));
    return h;
}

FoldPlan stratified_folds(const Dataset& ds, std::size_t k, Seed seed) {
    if (k < 2) throw Error(ErrorKind::InvalidArgument, "fold count must be at least 2");
    const auto n = ds.num_instances();
    if (k > n) throw Error(ErrorKind::KTooLarge, "k=" + std::to_string(k) + " exceeds " + std::to_string(n) + " instances");

    std::vector<std::vector<std::size_t>> by_class(ds.num_classes());
    for (std::size_t i = 0; i < n; ++i) by_class[ds.label(i)].push_back(i);

    Rng rng(seed);
    FoldPlan plan{k, std::vector<std::size_t>(n, 0), seed, true};
    std::size_t next = 0;
    for (auto& members : by_class) {
        rng.shuffle(members);
        for (const auto i : members) {
            plan.assignments[i] = next;
            next = (next + 1) % k;
        }
    }
    return plan;
}

std::pair<Dataset, Dataset> split(const Dataset& ds, const FoldPlan& plan, std::size_t fold) {
    if (fold >= plan.k) throw Error(ErrorKind::InvalidArgument, "fold index out of range");
    if (plan.assignments.size() != ds.num_instances()) {
        throw Error(ErrorKind::InvalidArgument, "fold plan does not match dataset size");
    }
    return {ds.select_rows(plan.train_rows(fold)), ds.select_rows(plan.test_rows(fold))};
}

}  // namespace tabml
