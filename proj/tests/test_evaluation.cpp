#include "support.hpp"

#include "tabml/error.hpp"
#include "tabml/evaluation.hpp"
#include "tabml/parallel.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace tabml;

namespace {

FoldScores scores(const std::vector<double>& values, std::size_t n_train, std::size_t n_test, Metric m = Metric::Accuracy,
                  std::size_t repeats = 1) {
    FoldScores s;
    s.metric = m;
    s.values = values;
    s.n_train.assign(values.size(), n_train);
    s.n_test.assign(values.size(), n_test);
    s.plan_fingerprints.assign(repeats, 17);
    return s;
}

ErrorKind error_of(const FoldScores& a, const FoldScores& b) {
    try {
        corrected_paired_ttest(a, b);
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::InvalidArgument;
}

Dataset skewed_constant() {
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < 100; ++i) rows.push_back({0.0, i < 90 ? 0.0 : 1.0});
    return support::make_dataset({AttributeSpec::numeric("flat"), support::class_attribute(2)}, rows);
}

Dataset mixed(Rng& rng, std::size_t n, std::size_t classes) {
    std::vector<AttributeSpec> attrs{AttributeSpec::numeric("x"), AttributeSpec::binary("b"), AttributeSpec::nominal("k", {"p", "q", "r"}),
                                     AttributeSpec::numeric("y"), support::class_attribute(classes)};
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < n; ++i) {
        const auto label = i < classes ? i : rng.uniform_index(classes);
        rows.push_back({rng.uniform() * 10 + static_cast<double>(label), static_cast<double>(rng.uniform_index(2)), static_cast<double>(rng.uniform_index(3)),
                        rng.uniform_index(4) == 0 ? 1.0 : rng.uniform(), static_cast<double>(label)});
    }
    return support::make_dataset(attrs, rows, "mixed");
}

}  // namespace

TEST_CASE("ten by tenfold gives one hundred values per metric") {
    const auto ds = support::noise_dataset(70, 3, 2, 1);
    const auto result = cross_validate(ModelSpec::defaults("nb", Algorithm::NaiveBayes), ds, CvProtocol{10, 10, 42});
    for (const auto m : kAllMetrics) {
        const auto& s = result.scores(m);
        CHECK(s.values.size() == 100);
        CHECK(s.plan_fingerprints.size() == 10);
        CHECK(s.n_train.front() == 63);
        CHECK(s.n_test.front() == 7);
    }
    const auto first = result.accuracy.first_repeats(3, 10);
    CHECK(first.values.size() == 30);
    CHECK(first.plan_fingerprints.size() == 3);
}

TEST_CASE("a constant predictor on a ninety-ten split scores exactly 0.9 in every fold") {
    const auto result = cross_validate(ModelSpec::defaults("nb", Algorithm::NaiveBayes), skewed_constant(), CvProtocol{10, 3, 7});
    for (const double v : result.accuracy.values) CHECK(std::abs(v - 0.9) <= 1e-15);
    CHECK(std::abs(result.accuracy.mean() - 0.9) <= 1e-15);
}

TEST_CASE("corrected t-test worked example") {
    // n = 100 differences with mean 0.02 and sample standard deviation 0.05; 63 train / 7 test per fold.
    const double spread = 0.05 * std::sqrt(99.0 / 100.0);
    std::vector<double> a, b;
    for (int i = 0; i < 100; ++i) {
        a.push_back(0.02 + (i % 2 == 0 ? spread : -spread));
        b.push_back(0.0);
    }
    const auto r = corrected_paired_ttest(scores(a, 63, 7, Metric::Accuracy, 10), scores(b, 63, 7, Metric::Accuracy, 10));
    // Closed form 0.02 / sqrt(0.0025 * (1/100 + 7/63)) and its two-sided p at 99 df, evaluated independently.
    CHECK(std::abs(r.t_statistic - 1.1493915422653818) <= 1e-9);
    CHECK(r.degrees_of_freedom == 99);
    CHECK(std::abs(r.p_value - 0.2531637828420759) <= 1e-9);
    CHECK(r.verdict == Verdict::NoSignificantDifference);
}

TEST_CASE("zero variance rules") {
    const std::vector<double> v{0.8, 0.7, 0.9, 0.85};
    const auto same = corrected_paired_ttest(scores(v, 9, 1), scores(v, 9, 1));
    CHECK(same.t_statistic == 0.0);
    CHECK(same.p_value == 1.0);
    CHECK(same.verdict == Verdict::NoSignificantDifference);

    const auto shifted = corrected_paired_ttest(scores(std::vector<double>(10, 0.6), 9, 1), scores(std::vector<double>(10, 0.5), 9, 1));
    CHECK(shifted.verdict == Verdict::ABetter);
    CHECK(shifted.t_statistic == std::numeric_limits<double>::infinity());
    CHECK(shifted.p_value == 0.0);

    const auto rmse = corrected_paired_ttest(scores(std::vector<double>(10, 0.6), 9, 1, Metric::Rmse),
                                             scores(std::vector<double>(10, 0.5), 9, 1, Metric::Rmse));
    CHECK(rmse.verdict == Verdict::BBetter);
}

TEST_CASE("t-test antisymmetry and the correction shrinking |t|") {
    Rng rng(12);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto n = 2 + rng.uniform_index(100);
        std::vector<double> a(n), b(n);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = rng.uniform();
            b[i] = rng.uniform();
        }
        const auto n_train = 1 + rng.uniform_index(500);
        const auto n_test = 1 + rng.uniform_index(200);
        const auto ab = corrected_paired_ttest(scores(a, n_train, n_test), scores(b, n_train, n_test));
        const auto ba = corrected_paired_ttest(scores(b, n_train, n_test), scores(a, n_train, n_test));
        CHECK(std::abs(ab.t_statistic + ba.t_statistic) <= 1e-12 * std::max(1.0, std::abs(ab.t_statistic)));
        CHECK(std::abs(ab.p_value - ba.p_value) <= 1e-12);
        if (ab.verdict == Verdict::ABetter) CHECK(ba.verdict == Verdict::BBetter);
        if (ab.verdict == Verdict::NoSignificantDifference) CHECK(ba.verdict == Verdict::NoSignificantDifference);

        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += a[i] - b[i];
        mean /= static_cast<double>(n);
        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) ss += (a[i] - b[i] - mean) * (a[i] - b[i] - mean);
        const double naive = mean / std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
        CHECK(std::abs(ab.t_statistic) <= std::abs(naive) * (1.0 + 1e-12));
    }
}

TEST_CASE("t-test input errors") {
    const std::vector<double> v{0.1, 0.2, 0.3};
    CHECK(error_of(scores(v, 9, 1), scores({0.1, 0.2}, 9, 1)) == ErrorKind::LengthMismatch);
    auto moved = scores(v, 9, 1);
    moved.plan_fingerprints = {18};
    CHECK(error_of(scores(v, 9, 1), moved) == ErrorKind::UnalignedFoldPlans);
    CHECK(error_of(scores(v, 9, 1), scores(v, 8, 2)) == ErrorKind::UnalignedFoldPlans);
    CHECK(error_of(scores(v, 9, 1), scores(v, 9, 1, Metric::Rmse)) == ErrorKind::InvalidArgument);
    CHECK(error_of(scores({}, 9, 1), scores({}, 9, 1)) == ErrorKind::EmptyInput);
}

TEST_CASE("report means equal the fold score means") {
    const auto ds = support::planted_dataset(60, 2, 3, 5);
    const std::vector<ModelSpec> models{ModelSpec::defaults("NB", Algorithm::NaiveBayes), ModelSpec::defaults("HT", Algorithm::HoeffdingTree)};
    ExperimentProtocol protocol;
    protocol.k = 5;
    protocol.repeats = 2;
    protocol.ttest_repeats = 3;
    const auto section = evaluate_models(ds, models, protocol);
    CHECK(section.num_predictors == 5);
    CHECK(section.comparisons.size() == 3);
    const auto plans = make_fold_plans(ds, {5, 3, protocol.seed});
    for (std::size_t m = 0; m < models.size(); ++m) {
        const auto cv = cross_validate(models[m], ds, plans, protocol.seed);
        CHECK(section.models[m].accuracy == cv.accuracy.first_repeats(2, 5).mean());
        CHECK(section.models[m].rmse == cv.rmse.first_repeats(2, 5).mean());
        CHECK(section.models[m].weighted_auc == cv.weighted_auc.first_repeats(2, 5).mean());
    }
}

TEST_CASE("smallest protocol: one model, two folds, four instances") {
    const auto ds = support::make_dataset({AttributeSpec::numeric("x"), support::class_attribute(2)}, {{0, 0}, {1, 1}, {0.1, 0}, {0.9, 1}});
    ExperimentProtocol protocol;
    protocol.k = 2;
    protocol.ttest_repeats = 1;
    const auto report = run_experiment(ds, {ModelSpec::defaults("NB", Algorithm::NaiveBayes)}, protocol);
    CHECK(report.evaluation_1.models.size() == 1);
    CHECK(report.evaluation_1.comparisons.empty());
    CHECK(report.evaluation_1.models[0].accuracy == 1.0);
    CHECK(!report.evaluation_2);
}

TEST_CASE("every classifier emits valid distributions") {
    Rng rng(31);
    for (int trial = 0; trial < 40; ++trial) {
        const auto classes = 2 + rng.uniform_index(3);
        const auto train = mixed(rng, 12 + rng.uniform_index(40), classes);
        const auto probe = mixed(rng, 20, classes);
        for (const auto alg : {Algorithm::RandomForest, Algorithm::Svm, Algorithm::NaiveBayes, Algorithm::HoeffdingTree, Algorithm::Lwl}) {
            auto spec = ModelSpec::defaults("m", alg);
            if (alg == Algorithm::RandomForest) spec.params = ForestParams{.n_trees = 10};
            const auto model = fit(spec, train, rng.next());
            for (std::size_t i = 0; i < probe.num_instances(); ++i) {
                const auto p = model->predict_distribution(probe.row(i));
                REQUIRE(p.size() == static_cast<Eigen::Index>(classes));
                CHECK(std::abs(p.sum() - 1.0) <= 1e-9);
                CHECK(p.minCoeff() >= 0.0);
                CHECK(p.maxCoeff() <= 1.0);
            }
        }
    }
}

TEST_CASE("experiments are deterministic across thread limits") {
    const auto ds = support::planted_dataset(80, 2, 4, 8);
    const std::vector<ModelSpec> models{ModelSpec::defaults("RF", Algorithm::RandomForest), ModelSpec::defaults("SVM", Algorithm::Svm),
                                        ModelSpec::defaults("LWL", Algorithm::Lwl)};
    ExperimentProtocol protocol;
    protocol.ttest_repeats = 2;
    SelectionOptions sel;
    sel.boruta.max_runs = 10;
    sel.boruta.forest.n_trees = 30;
    set_thread_limit(1);
    const auto a = run_experiment(ds, models, protocol, sel);
    set_thread_limit(8);
    const auto b = run_experiment(ds, models, protocol, sel);
    for (std::size_t m = 0; m < models.size(); ++m) {
        CHECK(a.evaluation_1.models[m].accuracy == b.evaluation_1.models[m].accuracy);
        CHECK(a.evaluation_1.models[m].weighted_auc == b.evaluation_1.models[m].weighted_auc);
    }
    REQUIRE(a.selection);
    CHECK(a.selection->confirmed == b.selection->confirmed);
    CHECK(a.evaluation_2.has_value() == b.evaluation_2.has_value());
}

TEST_CASE("metric and verdict names") {
    for (const auto m : kAllMetrics) CHECK(parse_metric(to_string(m)) == m);
    CHECK(to_string(Verdict::ABetter) == "A_better");
    CHECK(parse_verdict("NoSignificantDifference") == Verdict::NoSignificantDifference);
    CHECK(!parse_metric("f1"));
}
