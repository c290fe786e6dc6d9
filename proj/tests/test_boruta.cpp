#include "support.hpp"

#include "tabml/boruta.hpp"
#include "tabml/error.hpp"
#include "tabml/parallel.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace tabml;

namespace {

double pearson(const Vector& a, const Vector& b) {
    const Vector x = a.array() - a.mean();
    const Vector y = b.array() - b.mean();
    return x.dot(y) / std::sqrt(x.squaredNorm() * y.squaredNorm());
}

BorutaConfig quick(Seed seed) {
    BorutaConfig c;
    c.max_runs = 30;
    c.forest.n_trees = 60;
    c.seed = seed;
    return c;
}

}  // namespace

TEST_CASE("shadow extension layout") {
    const auto ds = support::noise_dataset(20, 3, 2, 1);
    Rng rng(1);
    const auto ext = shadow_extend(ds, rng);
    CHECK(ext.data.num_attributes() == 7);
    CHECK(ext.data.class_index() == 6);
    CHECK(ext.shadow_source == std::vector<std::size_t>{0, 1, 2});
    CHECK(ext.data.attribute(3).name == "shadow_n1");
    CHECK(ext.data.labels() == ds.labels());

    const auto padded = shadow_extend(ds, rng, {}, 5);
    CHECK(padded.shadow_source.size() == 5);
    CHECK(padded.data.num_attributes() == 3 + 5 + 1);

    const auto subset = shadow_extend(ds, rng, {2});
    CHECK(subset.originals == std::vector<std::size_t>{2});
    CHECK(subset.data.num_attributes() == 3);

    CHECK_THROWS_AS(shadow_extend(ds, rng, {3}), Error);
}

TEST_CASE("shadows preserve each column's multiset and break its row alignment") {
    const auto ds = support::noise_dataset(100, 4, 2, 3);
    Rng rng(8);
    double total_r = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const auto ext = shadow_extend(ds, rng);
        for (std::size_t k = 0; k < 4; ++k) {
            const Vector original = ds.values().col(static_cast<Eigen::Index>(k));
            const Vector shadow = ext.data.values().col(static_cast<Eigen::Index>(4 + k));
            std::vector<double> a(original.data(), original.data() + original.size());
            std::vector<double> b(shadow.data(), shadow.data() + shadow.size());
            std::sort(a.begin(), a.end());
            std::sort(b.begin(), b.end());
            CHECK(a == b);
            total_r += std::abs(pearson(original, shadow));
        }
    }
    CHECK(total_r / 200.0 < 0.3);
}

TEST_CASE("permutation importance ranks a perfect predictor first and ignores a constant") {
    Rng rng(4);
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < 200; ++i) {
        const double label = static_cast<double>(i % 2);
        rows.push_back({rng.uniform(), label, 7.0, rng.uniform(), label});
    }
    const auto ds = support::make_dataset({AttributeSpec::numeric("a"), AttributeSpec::binary("perfect"), AttributeSpec::numeric("constant"),
                                           AttributeSpec::numeric("b"), support::class_attribute(2)},
                                          rows);
    ForestParams p;
    p.n_trees = 80;
    const auto forest = train_random_forest(ds, p, 3);
    const auto imp = permutation_importance(ds, forest, 5);
    REQUIRE(imp.size() == 4);
    CHECK(imp[1].z_score > imp[0].z_score);
    CHECK(imp[1].z_score > imp[3].z_score);
    CHECK(imp[2].z_score == 0.0);
    CHECK(imp[2].mean_loss == 0.0);
    for (std::size_t j = 0; j < 4; ++j) CHECK(imp[j].attribute == j);
}

TEST_CASE("importance without out-of-bag rows is an error") {
    const auto ds = support::noise_dataset(30, 2, 2, 1);
    ForestParams p;
    p.n_trees = 5;
    p.bootstrap = false;
    CHECK_THROWS_AS(permutation_importance(ds, train_random_forest(ds, p, 1), 1), Error);
}

TEST_CASE("planted signals are confirmed and noise rejected") {
    for (Seed s = 0; s < 5; ++s) {
        const auto ds = support::planted_dataset(200, 3, 20, 100 + s);
        const auto result = boruta_run(ds, quick(s));
        for (std::size_t j = 0; j < 3; ++j) CHECK(result.decisions[j] == FeatureDecision::Confirmed);
        std::size_t rejected = 0;
        for (std::size_t j = 3; j < 23; ++j) {
            CHECK(result.decisions[j] != FeatureDecision::Confirmed);
            rejected += result.decisions[j] == FeatureDecision::Rejected;
        }
        CHECK(rejected >= 15);
    }
}

TEST_CASE("pure noise is almost entirely rejected") {
    // A noise column can correlate with the class by chance in a finite sample, so allow the odd confirmation.
    std::size_t confirmed = 0, rejected = 0;
    for (Seed s = 0; s < 5; ++s) {
        const auto result = boruta_run(support::noise_dataset(200, 20, 2, 300 + s), quick(s));
        confirmed += result.count(FeatureDecision::Confirmed);
        rejected += result.count(FeatureDecision::Rejected);
    }
    CHECK(confirmed <= 5);
    CHECK(rejected >= 80);
}

TEST_CASE("decisions partition the predictors and never change once final") {
    const auto ds = support::planted_dataset(150, 2, 8, 9);
    const auto result = boruta_run(ds, quick(2));
    CHECK(result.count(FeatureDecision::Confirmed) + result.count(FeatureDecision::Tentative) + result.count(FeatureDecision::Rejected) == 10);
    CHECK(result.z_history.size() == result.runs_completed);
    for (std::size_t p = 0; p < 10; ++p) {
        CHECK(result.hit_counts[p] <= result.runs_completed);
        if (result.decisions[p] == FeatureDecision::Tentative) {
            CHECK(result.decided_at[p] == 0);
            continue;
        }
        REQUIRE(result.decided_at[p] >= 1);
        for (std::size_t run = result.decided_at[p]; run < result.runs_completed; ++run) {
            const auto& originals = result.z_history[run].originals;
            const bool present = std::find(originals.begin(), originals.end(), result.predictors[p]) != originals.end();
            // Rejected attributes leave the system; confirmed ones stay in it.
            CHECK(present == (result.decisions[p] == FeatureDecision::Confirmed));
        }
    }
    for (const auto& run : result.z_history) CHECK(run.shadow_source.size() >= 5);
}

TEST_CASE("boruta is deterministic across thread limits") {
    const auto ds = support::planted_dataset(120, 2, 6, 4);
    set_thread_limit(1);
    const auto a = boruta_run(ds, quick(11));
    set_thread_limit(8);
    const auto b = boruta_run(ds, quick(11));
    CHECK(a.decisions == b.decisions);
    CHECK(a.hit_counts == b.hit_counts);
    CHECK(a.final_z == b.final_z);
    CHECK(a.runs_completed == b.runs_completed);
}

TEST_CASE("boruta configuration errors") {
    const auto ds = support::noise_dataset(20, 2, 2, 1);
    auto c = quick(1);
    c.max_runs = 6;
    CHECK_THROWS_AS(boruta_run(ds, c), Error);
    c = quick(1);
    c.p_value = 1.0;
    CHECK_THROWS_AS(boruta_run(ds, c), Error);
}

TEST_CASE("reducing a dataset keeps selected columns in order") {
    const auto ds = support::noise_dataset(10, 5, 2, 1);
    BorutaResult r;
    r.predictors = ds.predictor_indices();
    r.decisions = {FeatureDecision::Rejected, FeatureDecision::Confirmed, FeatureDecision::Tentative, FeatureDecision::Confirmed,
                   FeatureDecision::Rejected};
    const auto reduced = reduce_dataset(ds, r);
    REQUIRE(reduced.num_attributes() == 3);
    CHECK(reduced.attribute(0).name == "n2");
    CHECK(reduced.attribute(1).name == "n4");
    CHECK(reduced.values().col(1) == ds.values().col(3));
    CHECK(reduced.labels() == ds.labels());

    const auto with_tentative = reduce_dataset(ds, r, true);
    CHECK(with_tentative.num_predictors() == 3);
    CHECK(with_tentative.attribute(1).name == "n3");

    r.decisions.assign(5, FeatureDecision::Confirmed);
    CHECK(reduce_dataset(ds, r) == ds);

    r.decisions.assign(5, FeatureDecision::Rejected);
    try {
        reduce_dataset(ds, r);
        FAIL("expected NothingConfirmed");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NothingConfirmed);
    }
}
