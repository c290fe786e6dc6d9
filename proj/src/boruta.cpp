#include "tabml/boruta.hpp"

#include "tabml/error.hpp"
#include "tabml/metrics.hpp"
#include "tabml/parallel.hpp"

#include <boost/math/distributions/binomial.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace tabml {

namespace {

constexpr std::size_t kMinShadows = 5;
constexpr std::size_t kReseedAttempts = 10;

double upper_tail(std::size_t hits, std::size_t runs) {
    if (hits == 0) return 1.0;
    const boost::math::binomial_distribution<double> dist(static_cast<double>(runs), 0.5);
    return boost::math::cdf(boost::math::complement(dist, static_cast<double>(hits - 1)));
}

double lower_tail(std::size_t hits, std::size_t runs) {
    const boost::math::binomial_distribution<double> dist(static_cast<double>(runs), 0.5);
    return boost::math::cdf(dist, static_cast<double>(hits));
}

}  // namespace

std::string_view to_string(FeatureDecision d) noexcept {
    switch (d) {
        case FeatureDecision::Tentative: return "Tentative";
        case FeatureDecision::Confirmed: return "Confirmed";
        case FeatureDecision::Rejected: return "Rejected";
    }
    return "?";
}

std::size_t BorutaResult::count(FeatureDecision d) const {
    return static_cast<std::size_t>(std::count(decisions.begin(), decisions.end(), d));
}

ShadowExtension shadow_extend(const Dataset& ds, Rng& rng, const std::vector<std::size_t>& keep, std::size_t min_shadows) {
    ShadowExtension ext;
    ext.originals = keep.empty() ? ds.predictor_indices() : keep;
    if (ext.originals.empty()) throw Error(ErrorKind::NoPredictors, "no predictors to shadow");
    for (const auto j : ext.originals) {
        if (j >= ds.num_attributes() || j == ds.class_index()) {
            throw Error(ErrorKind::InvalidArgument, "shadow source must be a predictor column");
        }
    }
    const auto count = std::max(ext.originals.size(), min_shadows);
    for (std::size_t k = 0; k < count; ++k) ext.shadow_source.push_back(ext.originals[k % ext.originals.size()]);

    const auto n = static_cast<Eigen::Index>(ds.num_instances());
    const auto width = ext.originals.size() + ext.shadow_source.size() + 1;
    Matrix values(n, static_cast<Eigen::Index>(width));
    std::vector<AttributeSpec> attrs;
    attrs.reserve(width);
    Eigen::Index col = 0;
    for (const auto j : ext.originals) {
        values.col(col++) = ds.values().col(static_cast<Eigen::Index>(j));
        attrs.push_back(ds.attribute(j));
    }
    for (std::size_t k = 0; k < ext.shadow_source.size(); ++k) {
        const auto j = ext.shadow_source[k];
        const auto perm = rng.permutation(ds.num_instances());
        for (Eigen::Index i = 0; i < n; ++i) {
            values(i, col) = ds.values()(static_cast<Eigen::Index>(perm[static_cast<std::size_t>(i)]), static_cast<Eigen::Index>(j));
        }
        ++col;
        auto spec = ds.attribute(j);
        spec.name = "shadow_" + spec.name + (k >= ext.originals.size() ? "_" + std::to_string(k / ext.originals.size()) : "");
        attrs.push_back(std::move(spec));
    }
    values.col(col) = ds.values().col(static_cast<Eigen::Index>(ds.class_index()));
    attrs.push_back(ds.class_attribute());
    ext.data = Dataset(ds.name(), std::move(attrs), width - 1, std::move(values));
    return ext;
}

std::vector<ImportanceRecord> permutation_importance(const Dataset& ds, const RandomForest& forest, Seed seed) {
    const auto& trees = forest.trees();
    const auto& oob = forest.oob_rows();
    const auto width = ds.num_attributes();
    if (forest.num_attributes() != width) throw Error(ErrorKind::SchemaMismatch, "forest was trained on a different schema");

    // losses[t][j]; NaN marks trees without OOB rows.
    std::vector<std::vector<double>> losses(trees.size(), std::vector<double>(width, 0.0));
    parallel_for(trees.size(), [&](std::size_t t) {
        const auto& rows = oob[t];
        if (rows.empty()) {
            std::fill(losses[t].begin(), losses[t].end(), std::numeric_limits<double>::quiet_NaN());
            return;
        }
        const auto m = static_cast<Eigen::Index>(rows.size());
        Matrix block(m, static_cast<Eigen::Index>(width));
        std::vector<std::size_t> truth(rows.size());
        for (std::size_t r = 0; r < rows.size(); ++r) {
            block.row(static_cast<Eigen::Index>(r)) = ds.row(rows[r]);
            truth[r] = ds.label(rows[r]);
        }
        auto correct = [&](const Matrix& x) {
            std::size_t hits = 0;
            for (Eigen::Index r = 0; r < m; ++r) {
                if (argmax(trees[t].predict_distribution(x.row(r))) == truth[static_cast<std::size_t>(r)]) ++hits;
            }
            return static_cast<double>(hits);
        };
        const double baseline = correct(block);
        // Columns the tree never splits on cannot change its predictions.
        for (const auto j : trees[t].split_attributes()) {
            Rng rng(derive_seed(derive_seed(seed, t), j));
            const auto perm = rng.permutation(rows.size());
            Matrix permuted = block;
            const auto col = static_cast<Eigen::Index>(j);
            for (Eigen::Index r = 0; r < m; ++r) permuted(r, col) = block(static_cast<Eigen::Index>(perm[static_cast<std::size_t>(r)]), col);
            losses[t][j] = (baseline - correct(permuted)) / static_cast<double>(m);
        }
    });

    std::vector<ImportanceRecord> out;
    std::size_t with_oob = 0;
    for (const auto& l : losses) with_oob += std::isnan(l.empty() ? 0.0 : l.front()) ? 0 : 1;
    if (with_oob == 0) throw Error(ErrorKind::NoOobSamples, "no tree has out-of-bag rows");

    for (const auto j : ds.predictor_indices()) {
        double sum = 0.0;
        for (const auto& l : losses) {
            if (!std::isnan(l[j])) sum += l[j];
        }
        const double mean = sum / static_cast<double>(with_oob);
        double ss = 0.0;
        for (const auto& l : losses) {
            if (!std::isnan(l[j])) ss += (l[j] - mean) * (l[j] - mean);
        }
        const double sd = with_oob > 1 ? std::sqrt(ss / static_cast<double>(with_oob - 1)) : 0.0;
        out.push_back({j, mean, sd > 0 ? mean / sd : 0.0});
    }
    return out;
}

BorutaResult boruta_run(const Dataset& ds, const BorutaConfig& config) {
    if (config.max_runs < 7) throw Error(ErrorKind::InvalidArgument, "max_runs must be at least 7");
    if (!(config.p_value > 0 && config.p_value < 1)) throw Error(ErrorKind::InvalidArgument, "p_value must lie in (0, 1)");
    const auto predictors = ds.predictor_indices();
    if (predictors.empty()) throw Error(ErrorKind::NoPredictors, "dataset has no predictors");

    const auto P = predictors.size();
    BorutaResult result;
    result.predictors = predictors;
    result.decisions.assign(P, FeatureDecision::Tentative);
    result.hit_counts.assign(P, 0);
    result.decided_at.assign(P, 0);
    result.final_z.assign(P, 0.0);

    for (std::size_t run = 1; run <= config.max_runs; ++run) {
        if (result.count(FeatureDecision::Tentative) == 0) break;

        std::vector<std::size_t> kept;  // positions into `predictors`
        std::vector<std::size_t> columns;
        for (std::size_t p = 0; p < P; ++p) {
            if (result.decisions[p] != FeatureDecision::Rejected) {
                kept.push_back(p);
                columns.push_back(predictors[p]);
            }
        }

        ShadowExtension ext;
        std::vector<ImportanceRecord> importance;
        for (std::size_t attempt = 0;; ++attempt) {
            const Seed run_seed = derive_seed(config.seed, run * 1000 + attempt);
            Rng rng(run_seed);
            ext = shadow_extend(ds, rng, columns, kMinShadows);
            const auto forest = train_random_forest(ext.data, config.forest, derive_seed(run_seed, 1));
            try {
                importance = permutation_importance(ext.data, forest, derive_seed(run_seed, 2));
                break;
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::NoOobSamples || attempt + 1 >= kReseedAttempts) throw;
            }
        }

        BorutaRun record;
        record.originals = ext.originals;
        record.shadow_source = ext.shadow_source;
        const auto num_orig = ext.num_originals();
        record.original_importance.assign(importance.begin(), importance.begin() + static_cast<std::ptrdiff_t>(num_orig));
        record.shadow_importance.assign(importance.begin() + static_cast<std::ptrdiff_t>(num_orig), importance.end());
        record.shadow_max = -std::numeric_limits<double>::infinity();
        for (const auto& s : record.shadow_importance) record.shadow_max = std::max(record.shadow_max, s.z_score);

        for (std::size_t k = 0; k < kept.size(); ++k) {
            const auto p = kept[k];
            const double z = record.original_importance[k].z_score;
            result.final_z[p] = z;
            if (z > record.shadow_max) ++result.hit_counts[p];
        }
        result.runs_completed = run;
        result.z_history.push_back(std::move(record));

        const auto undecided = static_cast<double>(result.count(FeatureDecision::Tentative));
        for (std::size_t p = 0; p < P; ++p) {
            if (result.decisions[p] != FeatureDecision::Tentative) continue;
            const double confirm_p = std::min(1.0, upper_tail(result.hit_counts[p], run) * undecided);
            const double reject_p = std::min(1.0, lower_tail(result.hit_counts[p], run) * undecided);
            if (confirm_p < config.p_value) {
                result.decisions[p] = FeatureDecision::Confirmed;
                result.decided_at[p] = run;
            } else if (reject_p < config.p_value) {
                result.decisions[p] = FeatureDecision::Rejected;
                result.decided_at[p] = run;
            }
        }
    }
    return result;
}

Dataset reduce_dataset(const Dataset& ds, const BorutaResult& result, bool include_tentative) {
    if (result.predictors != ds.predictor_indices()) {
        throw Error(ErrorKind::SchemaMismatch, "selection result was produced from a different dataset");
    }
    std::vector<bool> keep(ds.num_attributes(), false);
    keep[ds.class_index()] = true;
    std::size_t kept = 0;
    for (std::size_t p = 0; p < result.predictors.size(); ++p) {
        const auto d = result.decisions[p];
        if (d == FeatureDecision::Confirmed || (include_tentative && d == FeatureDecision::Tentative)) {
            keep[result.predictors[p]] = true;
            ++kept;
        }
    }
    if (kept == 0) throw Error(ErrorKind::NothingConfirmed, "no predictor was selected");
    std::vector<std::size_t> columns;
    for (std::size_t j = 0; j < keep.size(); ++j) {
        if (keep[j]) columns.push_back(j);
    }
    return ds.select_columns(columns);
}

}  // namespace tabml
