#pragma once

#include "tabml/classifier.hpp"
#include "tabml/dataset.hpp"
#include "tabml/random.hpp"
#include "tabml/random_forest.hpp"

#include <string_view>
#include <vector>

namespace tabml {

struct ImportanceRecord {
    /// Column in the dataset the forest was trained on.
    std::size_t attribute = 0;
    double mean_loss = 0.0;
    /// mean_loss / standard deviation over trees; 0 when the deviation is 0.
    double z_score = 0.0;
};

enum class FeatureDecision { Tentative, Confirmed, Rejected };

std::string_view to_string(FeatureDecision d) noexcept;

struct BorutaConfig {
    std::size_t max_runs = 100;
    /// Level of each one-sided binomial tail, Bonferroni-corrected over undecided attributes.
    double p_value = 0.01;
    ForestParams forest;
    Seed seed = 42;
};

/// Importance of every column in one run. `shadow_source[k]` is the original
/// predictor column that shadow k was permuted from.
struct BorutaRun {
    std::vector<std::size_t> originals;
    std::vector<std::size_t> shadow_source;
    std::vector<ImportanceRecord> original_importance;
    std::vector<ImportanceRecord> shadow_importance;
    double shadow_max = 0.0;
};

struct BorutaResult {
    /// Indexed by predictor position (the i-th entry of Dataset::predictor_indices()).
    std::vector<std::size_t> predictors;
    std::vector<FeatureDecision> decisions;
    std::vector<std::size_t> hit_counts;
    /// Run index at which the decision became final; 0 while Tentative.
    std::vector<std::size_t> decided_at;
    /// z score from the last run in which the attribute took part.
    std::vector<double> final_z;
    std::size_t runs_completed = 0;
    std::vector<BorutaRun> z_history;

    std::size_t count(FeatureDecision d) const;
};

/// Result of extending a dataset with shadow columns. Columns are the kept
/// originals in schema order, then the shadows, then the class.
struct ShadowExtension {
    Dataset data;
    std::vector<std::size_t> originals;
    std::vector<std::size_t> shadow_source;
    std::size_t num_originals() const noexcept { return originals.size(); }
};

/// Adds one row-permuted copy per listed predictor (all predictors when
/// `keep` is empty). When fewer than `min_shadows` would result, further
/// independently permuted copies are added, cycling over the sources.
ShadowExtension shadow_extend(const Dataset& ds, Rng& rng, const std::vector<std::size_t>& keep = {}, std::size_t min_shadows = 0);

/// Per tree: OOB accuracy before and after permuting each column within the
/// OOB rows. Loss is averaged over trees; z = mean / sample std over trees.
/// One record per predictor column of `ds`, in column order.
std::vector<ImportanceRecord> permutation_importance(const Dataset& ds, const RandomForest& forest, Seed seed);

BorutaResult boruta_run(const Dataset& ds, const BorutaConfig& config);

/// Keeps Confirmed (and optionally Tentative) predictors plus the class, in schema order.
Dataset reduce_dataset(const Dataset& ds, const BorutaResult& result, bool include_tentative = false);

}  // namespace tabml
