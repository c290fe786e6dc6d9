#include "oracles.hpp"

#include "tabml/error.hpp"
#include "tabml/metrics.hpp"
#include "tabml/random.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <memory>

using namespace tabml;
using oracles::pair_count_auc;

namespace {

PredictionRecord rec(std::size_t truth, std::vector<double> p) {
    return PredictionRecord::make(truth, Eigen::Map<const Vector>(p.data(), static_cast<Eigen::Index>(p.size())));
}

double curve_auc(const std::vector<double>& scores, const std::vector<bool>& labels) {
    const auto flags = std::make_unique<bool[]>(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) flags[i] = labels[i];
    return auc(roc_curve(scores, std::span<const bool>(flags.get(), labels.size())));
}

RocCurve curve_of(const std::vector<double>& scores, const std::vector<bool>& labels) {
    const auto flags = std::make_unique<bool[]>(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) flags[i] = labels[i];
    return roc_curve(scores, std::span<const bool>(flags.get(), labels.size()));
}

std::vector<PredictionRecord> random_records(Rng& rng, std::size_t n, std::size_t classes) {
    std::vector<PredictionRecord> out;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> p(classes);
        double sum = 0.0;
        for (auto& v : p) sum += v = rng.uniform();
        for (auto& v : p) v /= sum;
        out.push_back(rec(rng.uniform_index(classes), p));
    }
    return out;
}

}  // namespace

TEST_CASE("argmax breaks ties toward the lowest index") {
    CHECK(argmax(Vector::Constant(4, 0.25)) == 0);
    CHECK(rec(0, {0.2, 0.4, 0.4}).predicted == 1);
}

TEST_CASE("accuracy worked examples") {
    std::vector<PredictionRecord> r;
    for (int i = 0; i < 6; ++i) r.push_back(rec(0, {0.9, 0.1}));
    r.push_back(rec(1, {0.9, 0.1}));
    CHECK(std::abs(accuracy(r) - 6.0 / 7.0) <= 1e-12);
    r.pop_back();
    CHECK(accuracy(r) == 1.0);
    CHECK_THROWS_AS(accuracy({}), Error);
}

TEST_CASE("rmse worked examples") {
    const std::vector<PredictionRecord> half{rec(0, {0.5, 0.5})};
    CHECK(std::abs(rmse(half) - 0.5) <= 1e-12);
    const std::vector<PredictionRecord> exact{rec(0, {1, 0, 0}), rec(2, {0, 0, 1})};
    CHECK(rmse(exact) == 0.0);
}

TEST_CASE("rmse matches a direct evaluation of the formula") {
    Rng rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        const auto C = 2 + rng.uniform_index(6);
        const auto records = random_records(rng, 1 + rng.uniform_index(40), C);
        double sum = 0.0;
        for (const auto& r : records) {
            for (std::size_t c = 0; c < C; ++c) {
                const double y = r.truth == c ? 1.0 : 0.0;
                sum += (r.distribution[static_cast<Eigen::Index>(c)] - y) * (r.distribution[static_cast<Eigen::Index>(c)] - y);
            }
        }
        const double expected = std::sqrt(sum / static_cast<double>(records.size() * C));
        CHECK(std::abs(rmse(records) - expected) <= 1e-12);
        CHECK(rmse(records) <= 1.0);
    }
}

TEST_CASE("roc worked examples") {
    CHECK(std::abs(curve_auc({0.9, 0.4, 0.35, 0.8}, {true, false, true, true}) - 2.0 / 3.0) <= 1e-12);

    const auto perfect = curve_of({0.9, 0.8, 0.3, 0.1}, {true, true, false, false});
    CHECK(std::any_of(perfect.points.begin(), perfect.points.end(), [](const RocPoint& p) { return p.fpr == 0.0 && p.tpr == 1.0; }));
    CHECK(auc(perfect) == 1.0);

    const auto flat = curve_of({0.5, 0.5, 0.5}, {true, false, true});
    REQUIRE(flat.points.size() == 2);
    CHECK(flat.points[0].fpr == 0.0);
    CHECK(flat.points[0].tpr == 0.0);
    CHECK(flat.points[1].fpr == 1.0);
    CHECK(flat.points[1].tpr == 1.0);
    CHECK(auc(flat) == 0.5);

    CHECK_THROWS_AS(curve_of({0.1, 0.2}, {true, true}), Error);
}

TEST_CASE("auc equals Mann-Whitney pair counting on fuzzed scores") {
    Rng rng(11);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto n = 2 + rng.uniform_index(60);
        std::vector<double> scores(n);
        std::vector<bool> labels(n);
        const bool coarse = trial % 2 == 0;
        for (std::size_t i = 0; i < n; ++i) {
            scores[i] = coarse ? static_cast<double>(rng.uniform_index(5)) / 4.0 : rng.uniform();
            labels[i] = rng.uniform_index(2) == 1;
        }
        labels[0] = true;
        labels[1] = false;
        const auto curve = curve_of(scores, labels);
        CHECK(std::abs(auc(curve) - pair_count_auc(scores, labels)) <= 1e-12);
        for (std::size_t i = 1; i < curve.points.size(); ++i) {
            CHECK(curve.points[i].fpr >= curve.points[i - 1].fpr);
            CHECK(curve.points[i].tpr >= curve.points[i - 1].tpr);
        }
        CHECK(curve.points.front().fpr == 0.0);
        CHECK(curve.points.back().tpr == 1.0);
    }
}

TEST_CASE("weighted auc uses class priors") {
    const std::vector<PredictionRecord> separated{rec(0, {0.8, 0.2}), rec(0, {0.7, 0.3}), rec(1, {0.1, 0.9}), rec(1, {0.4, 0.6})};
    CHECK(weighted_multiclass_auc(separated).weighted == 1.0);

    // Priors (0.75, 0.25); class 0 is perfectly ranked, class 1 scores all tie.
    const std::vector<PredictionRecord> mixed{rec(0, {0.6, 0.2, 0.2}), rec(0, {0.6, 0.2, 0.2}), rec(0, {0.6, 0.2, 0.2}),
                                              rec(1, {0.2, 0.2, 0.6})};
    const auto w = weighted_multiclass_auc(mixed);
    CHECK(w.per_class[0] == 1.0);
    CHECK(w.per_class[1] == 0.5);
    CHECK(std::isnan(w.per_class[2]));
    CHECK(std::abs(w.weighted - 0.875) <= 1e-12);

    const std::vector<PredictionRecord> single{rec(1, {0.5, 0.5}), rec(1, {0.2, 0.8})};
    CHECK_THROWS_AS(weighted_multiclass_auc(single), Error);
}

TEST_CASE("weighted auc of uninformative predictions is near one half") {
    Rng rng(5);
    const auto records = random_records(rng, 300, 3);
    const double w = weighted_multiclass_auc(records).weighted;
    CHECK(w > 0.4);
    CHECK(w < 0.6);
}

TEST_CASE("confusion matrix") {
    const std::vector<PredictionRecord> correct{rec(0, {1, 0, 0}), rec(1, {0, 1, 0}), rec(2, {0, 0, 1})};
    const auto cm = confusion(correct);
    CHECK(cm.trace() == 3);
    CHECK(cm.sum() == 3);

    std::vector<double> p(6, 0.0);
    p[5] = 1.0;
    const std::vector<PredictionRecord> one{rec(2, p)};
    const auto m = confusion(one);
    CHECK(m(2, 5) == 1);
    CHECK(m.sum() == 1);

    Rng rng(9);
    for (int trial = 0; trial < 200; ++trial) {
        const auto records = random_records(rng, 1 + rng.uniform_index(50), 2 + rng.uniform_index(5));
        const auto c = confusion(records);
        CHECK(std::abs(static_cast<double>(c.trace()) / static_cast<double>(c.sum()) - accuracy(records)) <= 1e-15);
    }
}

TEST_CASE("metrics ignore record order") {
    Rng rng(21);
    auto records = random_records(rng, 80, 4);
    records[0].truth = 0;
    records[1].truth = 1;
    const auto before = evaluate(records);
    std::reverse(records.begin(), records.end());
    rng.shuffle(std::span<PredictionRecord>(records));
    const auto after = evaluate(records);
    CHECK(before.accuracy == after.accuracy);
    CHECK(std::abs(before.rmse - after.rmse) <= 1e-15);
    CHECK(before.weighted_auc == after.weighted_auc);
}
