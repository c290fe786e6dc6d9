#include "tabml/evaluation.hpp"

#include "tabml/error.hpp"
#include "tabml/metrics.hpp"
#include "tabml/parallel.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <cmath>
#include <limits>
#include <numeric>

namespace tabml {

std::string_view to_string(Metric m) noexcept {
    switch (m) {
        case Metric::Accuracy: return "accuracy";
        case Metric::Rmse: return "rmse";
        case Metric::WeightedAuc: return "weighted_auc";
    }
    return "?";
}

std::optional<Metric> parse_metric(std::string_view name) noexcept {
    for (const auto m : kAllMetrics) {
        if (to_string(m) == name) return m;
    }
    return std::nullopt;
}

std::string_view to_string(Verdict v) noexcept {
    switch (v) {
        case Verdict::ABetter: return "A_better";
        case Verdict::BBetter: return "B_better";
        case Verdict::NoSignificantDifference: return "NoSignificantDifference";
    }
    return "?";
}

std::optional<Verdict> parse_verdict(std::string_view name) noexcept {
    for (const auto v : {Verdict::ABetter, Verdict::BBetter, Verdict::NoSignificantDifference}) {
        if (to_string(v) == name) return v;
    }
    return std::nullopt;
}

double FoldScores::mean() const {
    if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

FoldScores FoldScores::first_repeats(std::size_t repeats, std::size_t k) const {
    FoldScores out = *this;
    const auto n = std::min(values.size(), repeats * k);
    out.values.resize(n);
    out.n_train.resize(n);
    out.n_test.resize(n);
    out.plan_fingerprints.resize(std::min(plan_fingerprints.size(), repeats));
    return out;
}

const FoldScores& CvResult::scores(Metric m) const {
    switch (m) {
        case Metric::Accuracy: return accuracy;
        case Metric::Rmse: return rmse;
        case Metric::WeightedAuc: return weighted_auc;
    }
    return accuracy;
}

std::vector<FoldPlan> make_fold_plans(const Dataset& ds, const CvProtocol& protocol) {
    if (protocol.repeats == 0) throw Error(ErrorKind::InvalidArgument, "repeats must be at least 1");
    std::vector<FoldPlan> plans;
    plans.reserve(protocol.repeats);
    for (std::size_t r = 0; r < protocol.repeats; ++r) plans.push_back(stratified_folds(ds, protocol.k, derive_seed(protocol.seed, r)));
    return plans;
}

CvResult cross_validate(const ModelSpec& model, const Dataset& ds, const CvProtocol& protocol) {
    return cross_validate(model, ds, make_fold_plans(ds, protocol), protocol.seed);
}

CvResult cross_validate(const ModelSpec& model, const Dataset& ds, const std::vector<FoldPlan>& plans, Seed seed) {
    if (plans.empty()) throw Error(ErrorKind::InvalidArgument, "no fold plans");
    const auto k = plans.front().k;
    const auto tasks = plans.size() * k;

    std::vector<EvalSummary> summaries(tasks);
    std::vector<std::size_t> n_train(tasks);
    std::vector<std::size_t> n_test(tasks);
    parallel_for(tasks, [&](std::size_t task) {
        const auto& plan = plans[task / k];
        const auto [train, test] = split(ds, plan, task % k);
        const auto fitted = fit(model, train, derive_seed(seed, 0x5eed0000ULL + task));
        std::vector<PredictionRecord> records;
        records.reserve(test.num_instances());
        for (std::size_t i = 0; i < test.num_instances(); ++i) {
            records.push_back(PredictionRecord::make(test.label(i), fitted->predict_distribution(test.row(i))));
        }
        summaries[task] = evaluate(records);
        n_train[task] = train.num_instances();
        n_test[task] = test.num_instances();
    });

    CvResult out;
    for (auto* s : {&out.accuracy, &out.rmse, &out.weighted_auc}) {
        s->model_id = model.name;
        s->n_train = n_train;
        s->n_test = n_test;
        for (const auto& p : plans) s->plan_fingerprints.push_back(p.fingerprint());
    }
    out.accuracy.metric = Metric::Accuracy;
    out.rmse.metric = Metric::Rmse;
    out.weighted_auc.metric = Metric::WeightedAuc;
    for (const auto& s : summaries) {
        out.accuracy.values.push_back(s.accuracy);
        out.rmse.values.push_back(s.rmse);
        out.weighted_auc.values.push_back(s.weighted_auc);
    }
    return out;
}

ComparisonResult corrected_paired_ttest(const FoldScores& a, const FoldScores& b, double alpha) {
    if (a.values.size() != b.values.size() || a.n_test.size() != a.values.size() || a.n_train.size() != a.values.size()) {
        throw Error(ErrorKind::LengthMismatch, "fold score vectors differ in length");
    }
    if (a.metric != b.metric) throw Error(ErrorKind::InvalidArgument, "cannot compare different metrics");
    if (a.plan_fingerprints != b.plan_fingerprints || a.n_test != b.n_test || a.n_train != b.n_train) {
        throw Error(ErrorKind::UnalignedFoldPlans, "scores were not produced on the same fold plans");
    }
    const auto n = a.values.size();
    if (n == 0) throw Error(ErrorKind::EmptyInput, "no fold scores");

    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = a.values[i] - b.values[i];
    const double mean = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(n);
    double ss = 0.0;
    for (const auto v : d) ss += (v - mean) * (v - mean);
    const double var = n > 1 ? ss / static_cast<double>(n - 1) : 0.0;

    const double test_total = std::accumulate(a.n_test.begin(), a.n_test.end(), 0.0);
    const double train_total = std::accumulate(a.n_train.begin(), a.n_train.end(), 0.0);
    const double ratio = train_total > 0 ? test_total / train_total : 0.0;

    ComparisonResult r;
    r.degrees_of_freedom = n - 1;
    const auto favour = [&](double direction) {
        const bool a_larger = direction > 0;
        return a_larger == higher_is_better(a.metric) ? Verdict::ABetter : Verdict::BBetter;
    };
    if (var == 0.0) {
        if (mean == 0.0) {
            r.t_statistic = 0.0;
            r.p_value = 1.0;
            r.verdict = Verdict::NoSignificantDifference;
        } else {
            r.t_statistic = std::copysign(std::numeric_limits<double>::infinity(), mean);
            r.p_value = 0.0;
            r.verdict = favour(mean);
        }
        return r;
    }
    r.t_statistic = mean / std::sqrt(var * (1.0 / static_cast<double>(n) + ratio));
    const boost::math::students_t dist(static_cast<double>(n - 1));
    r.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.t_statistic)));
    r.verdict = r.p_value < alpha ? favour(mean) : Verdict::NoSignificantDifference;
    return r;
}

DatasetSummary summarize(const Dataset& ds) {
    return {ds.name(), ds.num_instances(), ds.num_predictors(), ds.class_attribute().levels, ds.class_counts()};
}

SelectionSummary summarize(const Dataset& ds, const BorutaResult& result, bool include_tentative) {
    SelectionSummary s;
    s.runs_completed = result.runs_completed;
    s.confirmed = result.count(FeatureDecision::Confirmed);
    s.tentative = result.count(FeatureDecision::Tentative);
    s.rejected = result.count(FeatureDecision::Rejected);
    s.predictors = result.predictors.size();
    s.include_tentative = include_tentative;
    const auto kept = s.confirmed + (include_tentative ? s.tentative : 0);
    s.reduction_percent = s.predictors ? 100.0 * static_cast<double>(s.predictors - kept) / static_cast<double>(s.predictors) : 0.0;
    for (std::size_t p = 0; p < result.predictors.size(); ++p) {
        s.attributes.push_back({ds.attribute(result.predictors[p]).name, result.decisions[p], result.hit_counts[p], result.final_z[p]});
    }
    return s;
}

EvaluationSection evaluate_models(const Dataset& ds, const std::vector<ModelSpec>& models, const ExperimentProtocol& protocol) {
    if (models.empty()) throw Error(ErrorKind::InvalidArgument, "no models configured");
    if (protocol.repeats == 0 || protocol.ttest_repeats == 0) throw Error(ErrorKind::InvalidArgument, "repeats must be at least 1");
    const auto total_repeats = std::max(protocol.repeats, protocol.ttest_repeats);
    const auto plans = make_fold_plans(ds, {protocol.k, total_repeats, protocol.seed});

    std::vector<CvResult> results;
    results.reserve(models.size());
    for (const auto& m : models) results.push_back(cross_validate(m, ds, plans, protocol.seed));

    EvaluationSection section;
    section.num_predictors = ds.num_predictors();
    for (std::size_t i = 0; i < models.size(); ++i) {
        const auto& r = results[i];
        section.models.push_back({models[i].name, models[i].algorithm(), r.accuracy.first_repeats(protocol.repeats, protocol.k).mean(),
                                  r.rmse.first_repeats(protocol.repeats, protocol.k).mean(),
                                  r.weighted_auc.first_repeats(protocol.repeats, protocol.k).mean()});
    }
    for (const auto metric : kAllMetrics) {
        for (std::size_t i = 0; i < models.size(); ++i) {
            for (std::size_t j = i + 1; j < models.size(); ++j) {
                const auto a = results[i].scores(metric).first_repeats(protocol.ttest_repeats, protocol.k);
                const auto b = results[j].scores(metric).first_repeats(protocol.ttest_repeats, protocol.k);
                section.comparisons.push_back({models[i].name, models[j].name, metric, corrected_paired_ttest(a, b, protocol.alpha)});
            }
        }
    }
    return section;
}

ExperimentReport run_experiment(const Dataset& ds, const std::vector<ModelSpec>& models, const ExperimentProtocol& protocol,
                                const std::optional<SelectionOptions>& selection) {
    ExperimentReport report;
    report.protocol = protocol;
    report.dataset = summarize(ds);
    report.evaluation_1 = evaluate_models(ds, models, protocol);
    if (!selection) return report;

    const auto result = boruta_run(ds, selection->boruta);
    report.selection = summarize(ds, result, selection->include_tentative);
    try {
        const auto reduced = reduce_dataset(ds, result, selection->include_tentative);
        report.evaluation_2 = evaluate_models(reduced, models, protocol);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::NothingConfirmed) throw;
        report.evaluation_2_error = e.what();
    }
    return report;
}

}  // namespace tabml
