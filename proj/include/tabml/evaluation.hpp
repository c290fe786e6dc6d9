#pragma once

#include "tabml/boruta.hpp"
#include "tabml/classifier.hpp"
#include "tabml/dataset.hpp"

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tabml {

enum class Metric { Accuracy, Rmse, WeightedAuc };

inline constexpr std::array<Metric, 3> kAllMetrics{Metric::Accuracy, Metric::Rmse, Metric::WeightedAuc};

std::string_view to_string(Metric m) noexcept;
std::optional<Metric> parse_metric(std::string_view name) noexcept;
/// False for RMSE.
constexpr bool higher_is_better(Metric m) noexcept { return m != Metric::Rmse; }

/// One value per (repeat, fold), repeat-major.
struct FoldScores {
    std::string model_id;
    Metric metric = Metric::Accuracy;
    std::vector<double> values;
    std::vector<std::size_t> n_train;
    std::vector<std::size_t> n_test;
    /// FoldPlan fingerprint per repeat.
    std::vector<std::uint64_t> plan_fingerprints;

    double mean() const;
    /// Keeps the first `repeats` repeats of a k-fold run.
    FoldScores first_repeats(std::size_t repeats, std::size_t k) const;
};

enum class Verdict { ABetter, BBetter, NoSignificantDifference };

std::string_view to_string(Verdict v) noexcept;
std::optional<Verdict> parse_verdict(std::string_view name) noexcept;

struct ComparisonResult {
    double t_statistic = 0.0;
    std::size_t degrees_of_freedom = 0;
    double p_value = 1.0;
    Verdict verdict = Verdict::NoSignificantDifference;
};

struct CvProtocol {
    std::size_t k = 10;
    std::size_t repeats = 1;
    Seed seed = 42;
};

/// Stratified plans for every repeat; repeat r uses a seed derived from (seed, r).
std::vector<FoldPlan> make_fold_plans(const Dataset& ds, const CvProtocol& protocol);

struct CvResult {
    FoldScores accuracy;
    FoldScores rmse;
    FoldScores weighted_auc;

    const FoldScores& scores(Metric m) const;
};

CvResult cross_validate(const ModelSpec& model, const Dataset& ds, const CvProtocol& protocol);
/// Same, on caller-supplied plans (shared across models so t-test pairs line up).
CvResult cross_validate(const ModelSpec& model, const Dataset& ds, const std::vector<FoldPlan>& plans, Seed seed);

/// Variance-corrected resampled paired t-test on d = a - b:
/// t = mean(d) / sqrt(var(d) * (1/n + n_test/n_train)), n - 1 degrees of freedom.
/// The verdict orientation follows the metric, so a lower RMSE counts as better.
ComparisonResult corrected_paired_ttest(const FoldScores& a, const FoldScores& b, double alpha = 0.05);

struct ModelSummary {
    std::string name;
    Algorithm algorithm = Algorithm::RandomForest;
    double accuracy = 0.0;
    double rmse = 0.0;
    double weighted_auc = 0.0;
};

struct PairwiseComparison {
    std::string model_a;
    std::string model_b;
    Metric metric = Metric::Accuracy;
    ComparisonResult result;
};

struct EvaluationSection {
    std::size_t num_predictors = 0;
    std::vector<ModelSummary> models;
    std::vector<PairwiseComparison> comparisons;
};

struct SelectionAttribute {
    std::string name;
    FeatureDecision decision = FeatureDecision::Tentative;
    std::size_t hits = 0;
    double z_score = 0.0;
};

struct SelectionSummary {
    std::size_t runs_completed = 0;
    std::size_t confirmed = 0;
    std::size_t tentative = 0;
    std::size_t rejected = 0;
    std::size_t predictors = 0;
    bool include_tentative = false;
    /// Percent of predictors removed from the reduced dataset.
    double reduction_percent = 0.0;
    std::vector<SelectionAttribute> attributes;
};

struct DatasetSummary {
    std::string name;
    std::size_t instances = 0;
    std::size_t predictors = 0;
    std::vector<std::string> class_levels;
    std::vector<std::size_t> class_counts;
};

struct ExperimentProtocol {
    std::size_t k = 10;
    /// Repeats averaged into the report tables.
    std::size_t repeats = 1;
    /// Repeats fed to the significance tests.
    std::size_t ttest_repeats = 10;
    Seed seed = 42;
    double alpha = 0.05;
};

struct SelectionOptions {
    BorutaConfig boruta;
    bool include_tentative = false;
};

struct ExperimentReport {
    ExperimentProtocol protocol;
    DatasetSummary dataset;
    EvaluationSection evaluation_1;
    std::optional<EvaluationSection> evaluation_2;
    std::optional<SelectionSummary> selection;
    /// Set when selection ran but evaluation 2 could not.
    std::string evaluation_2_error;
};

DatasetSummary summarize(const Dataset& ds);
SelectionSummary summarize(const Dataset& ds, const BorutaResult& result, bool include_tentative);

/// Evaluates every model on plans shared across models, then all pairwise comparisons per metric.
EvaluationSection evaluate_models(const Dataset& ds, const std::vector<ModelSpec>& models, const ExperimentProtocol& protocol);

/// Evaluation 1 on `ds`; with selection, Boruta on the full dataset followed
/// by evaluation 2 on the reduced dataset.
ExperimentReport run_experiment(const Dataset& ds, const std::vector<ModelSpec>& models, const ExperimentProtocol& protocol,
                                const std::optional<SelectionOptions>& selection = std::nullopt);

}  // namespace tabml
