#pragma once

#include "tabml/types.hpp"

#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace tabml {

enum class AttributeKind { Numeric, Binary, Nominal };

struct AttributeSpec {
    std::string name;
    AttributeKind kind = AttributeKind::Numeric;
    /// Level names for Binary ("0", "1") and Nominal attributes; empty for Numeric.
    std::vector<std::string> levels;

    static AttributeSpec numeric(std::string name);
    static AttributeSpec binary(std::string name);
    /// Level list {"0","1"} normalizes to Binary.
    static AttributeSpec nominal(std::string name, std::vector<std::string> levels);

    bool is_nominal() const noexcept { return kind != AttributeKind::Numeric; }
    std::size_t num_levels() const noexcept { return levels.size(); }
    /// Index of `level`, or nullopt.
    std::optional<std::size_t> level_index(const std::string& level) const;

    friend bool operator==(const AttributeSpec&, const AttributeSpec&) = default;
};

/// Validated, immutable tabular dataset. The class attribute stays at its
/// declared column; predictors are every other column.
class Dataset {
public:
    Dataset() = default;
    /// Validates the schema invariants and throws tabml::Error on violation.
    Dataset(std::string name, std::vector<AttributeSpec> attributes, std::size_t class_index, Matrix values);

    const std::string& name() const noexcept { return name_; }
    const std::vector<AttributeSpec>& attributes() const noexcept { return attributes_; }
    const AttributeSpec& attribute(std::size_t j) const { return attributes_.at(j); }
    std::size_t class_index() const noexcept { return class_index_; }
    const AttributeSpec& class_attribute() const { return attributes_[class_index_]; }
    const Matrix& values() const noexcept { return values_; }

    std::size_t num_instances() const noexcept { return static_cast<std::size_t>(values_.rows()); }
    std::size_t num_attributes() const noexcept { return attributes_.size(); }
    std::size_t num_predictors() const noexcept { return attributes_.size() - 1; }
    std::size_t num_classes() const noexcept { return class_attribute().num_levels(); }

    /// Column indices of the predictors, in schema order.
    std::vector<std::size_t> predictor_indices() const;

    auto row(std::size_t i) const { return values_.row(static_cast<Eigen::Index>(i)); }
    std::size_t label(std::size_t i) const { return static_cast<std::size_t>(values_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(class_index_))); }
    std::vector<std::size_t> labels() const;
    /// Instance count per class level.
    std::vector<std::size_t> class_counts() const;

    /// Rows in the given order (duplicates allowed).
    Dataset select_rows(const std::vector<std::size_t>& rows) const;
    /// Keeps the listed columns in the given order; the class column must be among them.
    Dataset select_columns(const std::vector<std::size_t>& columns) const;

    friend bool operator==(const Dataset& a, const Dataset& b);

private:
    std::string name_;
    std::vector<AttributeSpec> attributes_;
    std::size_t class_index_ = 0;
    Matrix values_;
};

struct CsvOptions {
    bool has_header = true;
    /// Column name (requires a header) or zero-based index. Defaults to the last column.
    std::variant<std::monostate, std::string, std::size_t> class_column;
    /// Forces the kind of named columns. A Nominal override uses the observed levels.
    std::map<std::string, AttributeKind> kind_overrides;
    std::string name = "dataset";
};

Dataset load_csv(std::istream& source, const CsvOptions& options = {});
Dataset load_csv_file(const std::string& path, const CsvOptions& options = {});

/// Writes the header and one line per instance using level names for nominal
/// attributes and shortest round-trip text for numbers.
void write_csv(std::ostream& out, const Dataset& ds);

struct ArffOptions {
    /// Overrides the default (last attribute) class column.
    std::optional<std::string> class_attribute;
};

Dataset load_arff(std::istream& source, const ArffOptions& options = {});
Dataset load_arff_file(const std::string& path, const ArffOptions& options = {});

/// Assignment of instances to k cross-validation folds.
struct FoldPlan {
    std::size_t k = 0;
    std::vector<std::size_t> assignments;
    Seed seed = 0;
    bool stratified = true;

    std::size_t fold_size(std::size_t fold) const;
    std::vector<std::size_t> test_rows(std::size_t fold) const;
    std::vector<std::size_t> train_rows(std::size_t fold) const;
    /// Hash of (k, assignments); equal plans have equal fingerprints.
    std::uint64_t fingerprint() const;

    friend bool operator==(const FoldPlan&, const FoldPlan&) = default;
};

/// Per class, instances are shuffled and dealt round-robin, continuing the
/// fold counter across classes so overall fold sizes also differ by at most one.
FoldPlan stratified_folds(const Dataset& ds, std::size_t k, Seed seed);

std::pair<Dataset, Dataset> split(const Dataset& ds, const FoldPlan& plan, std::size_t fold);

}  // namespace tabml
