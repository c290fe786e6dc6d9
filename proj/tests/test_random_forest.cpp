#include "support.hpp"

#include "tabml/error.hpp"
#include "tabml/parallel.hpp"
#include "tabml/random_forest.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace tabml;

namespace {

Dataset mixed_dataset(std::size_t n, Seed seed) {
    Rng rng(seed);
    std::vector<AttributeSpec> attrs{AttributeSpec::numeric("x"), AttributeSpec::numeric("y"), AttributeSpec::nominal("colour", {"r", "g", "b"}),
                                     AttributeSpec::binary("flag"), support::class_attribute(3)};
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = rng.uniform();
        const double y = rng.uniform();
        const double colour = static_cast<double>(rng.uniform_index(3));
        const double flag = static_cast<double>(rng.uniform_index(2));
        std::size_t label = x + 0.3 * colour > 0.8 ? 2 : (y > 0.5 ? 1 : 0);
        if (rng.uniform() < 0.15) label = rng.uniform_index(3);
        rows.push_back({x, y, colour, flag, static_cast<double>(label)});
    }
    return support::make_dataset(attrs, rows, "mixed");
}

double gini_gain_numeric(const Dataset& ds, std::size_t j) {
    // Best weighted Gini decrease over all midpoints, computed naively.
    const auto n = ds.num_instances();
    const auto C = ds.num_classes();
    auto gini = [&](const std::vector<std::size_t>& rows) {
        if (rows.empty()) return 0.0;
        std::vector<double> counts(C, 0.0);
        for (const auto r : rows) counts[ds.label(r)] += 1.0;
        double g = 1.0;
        for (const auto c : counts) g -= (c / static_cast<double>(rows.size())) * (c / static_cast<double>(rows.size()));
        return g;
    };
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    const double parent = gini(all);
    double best = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            const double va = ds.values()(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(j));
            const double vb = ds.values()(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(j));
            if (!(va < vb)) continue;
            const double t = (va + vb) / 2.0;
            std::vector<std::size_t> left, right;
            for (std::size_t r = 0; r < n; ++r) (ds.values()(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) <= t ? left : right).push_back(r);
            const double g = parent - (static_cast<double>(left.size()) * gini(left) + static_cast<double>(right.size()) * gini(right)) / static_cast<double>(n);
            best = std::max(best, g);
        }
    }
    return best;
}

}  // namespace

TEST_CASE("default mtry") {
    CHECK(default_mtry(205) == 8);
    CHECK(default_mtry(55) == 6);
    CHECK(default_mtry(1) == 1);
    CHECK(default_mtry(2) == 2);
}

TEST_CASE("leaf distributions are the class proportions of the training rows routed there") {
    const auto ds = mixed_dataset(120, 4);
    ForestParams p;
    p.n_trees = 1;
    p.mtry = ds.num_predictors();
    p.bootstrap = false;
    p.max_depth = 3;
    const auto forest = train_random_forest(ds, p, 17);
    const auto& tree = forest.trees().front();
    Rng rng(8);
    for (int probe = 0; probe < 200; ++probe) {
        const auto q = ds.row(rng.uniform_index(ds.num_instances()));
        std::vector<std::size_t> rows;
        for (std::size_t i = 0; i < ds.num_instances(); ++i) rows.push_back(i);
        std::size_t id = 0;
        while (tree.nodes()[id].attribute >= 0) {
            const auto& node = tree.nodes()[id];
            const auto col = static_cast<Eigen::Index>(node.attribute);
            std::size_t branch = node.nominal ? static_cast<std::size_t>(q[col]) : (q[col] <= node.threshold ? 0 : 1);
            std::vector<std::size_t> kept;
            for (const auto r : rows) {
                const double v = ds.values()(static_cast<Eigen::Index>(r), col);
                const std::size_t b = node.nominal ? static_cast<std::size_t>(v) : (v <= node.threshold ? 0 : 1);
                if (b == branch) kept.push_back(r);
            }
            rows = kept;
            id = static_cast<std::size_t>(node.children[branch]);
        }
        REQUIRE(!rows.empty());
        Vector expected = Vector::Zero(3);
        for (const auto r : rows) expected[static_cast<Eigen::Index>(ds.label(r))] += 1.0;
        expected /= static_cast<double>(rows.size());
        CHECK((forest.predict_distribution(q) - expected).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("a single unbootstrapped tree with all predictors picks the best Gini split at the root") {
    for (Seed s = 0; s < 20; ++s) {
        const auto ds = support::noise_dataset(40, 3, 2, s);
        ForestParams p;
        p.n_trees = 1;
        p.mtry = 3;
        p.bootstrap = false;
        const auto forest = train_random_forest(ds, p, s);
        const auto& root = forest.trees().front().nodes().front();
        double best = 0.0;
        for (std::size_t j = 0; j < 3; ++j) best = std::max(best, gini_gain_numeric(ds, j));
        REQUIRE(root.attribute >= 0);
        // Exact ties between attributes may go either way.
        CHECK(std::abs(gini_gain_numeric(ds, static_cast<std::size_t>(root.attribute)) - best) <= 1e-12);
        CHECK(forest.oob_rows().front().empty());
    }
}

TEST_CASE("out-of-bag accuracy on a pure-noise target is near chance") {
    const auto ds = support::noise_dataset(200, 10, 2, 31);
    const auto forest = train_random_forest(ds, {}, 5);
    const double oob = forest.oob_accuracy(ds);
    MESSAGE("oob accuracy " << oob);
    CHECK(oob > 0.4);
    CHECK(oob < 0.6);
    for (const auto& rows : forest.oob_rows()) CHECK(!rows.empty());
}

TEST_CASE("prediction variance across seeds shrinks as trees are added") {
    const auto ds = mixed_dataset(150, 12);
    auto spread = [&](std::size_t trees) {
        const std::size_t seeds = 10;
        double total = 0.0;
        for (std::size_t probe = 0; probe < 20; ++probe) {
            const auto q = ds.row(probe);
            std::vector<Vector> preds;
            for (Seed s = 0; s < seeds; ++s) {
                ForestParams p;
                p.n_trees = trees;
                preds.push_back(train_random_forest(ds, p, 1000 + s).predict_distribution(q));
            }
            for (Eigen::Index c = 0; c < 3; ++c) {
                double mean = 0.0;
                for (const auto& v : preds) mean += v[c] / seeds;
                double var = 0.0;
                for (const auto& v : preds) var += (v[c] - mean) * (v[c] - mean) / (seeds - 1);
                total += std::sqrt(var);
            }
        }
        return total / 60.0;
    };
    const double one = spread(1);
    const double hundred = spread(100);
    MESSAGE("mean per-class std: 1 tree " << one << ", 100 trees " << hundred);
    CHECK(hundred < one);
}

TEST_CASE("training is deterministic and independent of the worker count") {
    const auto ds = mixed_dataset(100, 2);
    set_thread_limit(1);
    const auto a = train_random_forest(ds, {}, 77);
    set_thread_limit(8);
    const auto b = train_random_forest(ds, {}, 77);
    const auto c = train_random_forest(ds, {}, 78);
    bool any_difference = false;
    for (std::size_t i = 0; i < ds.num_instances(); ++i) {
        CHECK(a.predict_distribution(ds.row(i)) == b.predict_distribution(ds.row(i)));
        any_difference |= a.predict_distribution(ds.row(i)) != c.predict_distribution(ds.row(i));
    }
    CHECK(any_difference);
    CHECK(a.oob_rows() == b.oob_rows());
}

TEST_CASE("random forest errors") {
    const auto ds = mixed_dataset(10, 1);
    CHECK_THROWS_AS(train_random_forest(ds.select_rows({}), {}, 1), Error);
    ForestParams bad;
    bad.n_trees = 0;
    CHECK_THROWS_AS(train_random_forest(ds, bad, 1), Error);
    bad.n_trees = 1;
    bad.mtry = 99;
    CHECK_THROWS_AS(train_random_forest(ds, bad, 1), Error);
    const auto forest = train_random_forest(ds, {}, 1);
    CHECK_THROWS_AS(forest.predict_distribution(RowVector::Zero(2)), Error);
}
