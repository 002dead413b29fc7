#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "oracles.hpp"
#include "rebalance/metrics.hpp"

using namespace rebalance;
using namespace rebalance::metrics;

TEST_CASE("confusion counts") {
    const auto c = confusion({1, 1, 0, 0}, {1, 0, 1, 0});
    REQUIRE(c.tp == 1);
    REQUIRE(c.fn == 1);
    REQUIRE(c.fp == 1);
    REQUIRE(c.tn == 1);

    const auto perfect = confusion({1, 0, 1}, {1, 0, 1});
    REQUIRE(perfect.fn == 0);
    REQUIRE(perfect.fp == 0);

    const auto blind = confusion({1, 1, 1}, {0, 0, 0});
    REQUIRE(blind.tp == 0);
    REQUIRE(blind.fn == 3);

    REQUIRE_THROWS_AS(confusion({1}, {1, 0}), InputError);
    REQUIRE_THROWS_AS(confusion({}, {}), InputError);
}

TEST_CASE("precision, recall, F1") {
    SECTION("equal precision and recall give equal F1") {
        const auto m = precision_recall_f1({8, 2, 2, 10});
        REQUIRE(m.precision == Catch::Approx(0.8));
        REQUIRE(m.recall == Catch::Approx(0.8));
        REQUIRE(m.f1 == Catch::Approx(0.8));
    }
    SECTION("degenerate conventions resolve to zero") {
        const auto m = precision_recall_f1({0, 5, 0, 3});
        REQUIRE(m.precision == 0.0);
        REQUIRE(m.recall == 0.0);
        REQUIRE(m.f1 == 0.0);
    }
    SECTION("hand-computed asymmetric case") {
        const auto m = precision_recall_f1({6, 4, 2, 0});
        REQUIRE(m.precision == Catch::Approx(0.75));
        REQUIRE(m.recall == Catch::Approx(0.6));
        REQUIRE(m.f1 == Catch::Approx(2.0 * 0.45 / 1.35));
    }
}

TEST_CASE("AUC basics") {
    SECTION("perfect ordering") {
        REQUIRE(auc({1, 1, 0, 0}, {0.9, 0.8, 0.3, 0.1}) == 1.0);
    }
    SECTION("all ties give one half") {
        REQUIRE(auc({1, 0, 1, 0}, {0.5, 0.5, 0.5, 0.5}) == 0.5);
    }
    SECTION("worked pair count") {
        REQUIRE(auc({1, 1, 0, 0}, {0.9, 0.4, 0.6, 0.2}) == Catch::Approx(0.75));
    }
    SECTION("single-class truth throws") {
        REQUIRE_THROWS_AS(auc({1, 1}, {0.5, 0.6}), InputError);
    }
}

TEST_CASE("AUC equals the exhaustive oracle on random instances") {
    Rng rng(101);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 2 + uniform_index(rng, 29);
        std::vector<int> y(n);
        Vec s(n);
        bool has_pos = false, has_neg = false;
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = uniform01(rng) < 0.4 ? 1 : 0;
            // quantized scores so ties actually happen
            s[i] = std::floor(uniform01(rng) * 8.0) / 8.0;
            (y[i] ? has_pos : has_neg) = true;
        }
        if (!has_pos || !has_neg) continue;
        REQUIRE(auc(y, s) == Catch::Approx(oracle::oracle_auc(y, s)).epsilon(1e-12));
    }
}

TEST_CASE("AUC is invariant under strictly monotone score transforms") {
    Rng rng(7);
    std::vector<int> y;
    Vec s;
    for (int i = 0; i < 40; ++i) {
        y.push_back(uniform01(rng) < 0.3 ? 1 : 0);
        s.push_back(uniform01(rng));
    }
    y[0] = 1;
    y[1] = 0;
    const double base = auc(y, s);
    Vec exp_s = s, cube_s = s;
    for (double& v : exp_s) v = std::exp(3.0 * v);
    for (double& v : cube_s) v = v * v * v;
    REQUIRE(auc(y, exp_s) == Catch::Approx(base).epsilon(1e-12));
    REQUIRE(auc(y, cube_s) == Catch::Approx(base).epsilon(1e-12));
}

TEST_CASE("stratified k-fold partitions with per-class balance") {
    SECTION("exact divisibility: 10 pos + 90 neg, k = 10") {
        std::vector<int> labels(100, 0);
        for (int i = 0; i < 10; ++i) labels[static_cast<std::size_t>(i * 7)] = 1;
        const auto splits = stratified_kfold(labels, 10, 3);
        for (const auto& sp : splits) {
            std::size_t pos = 0;
            for (std::size_t i : sp.test_indices) pos += static_cast<std::size_t>(labels[i]);
            REQUIRE(pos == 1);
            REQUIRE(sp.test_indices.size() == 10);
        }
    }
    SECTION("disjoint cover") {
        std::vector<int> labels;
        for (int i = 0; i < 73; ++i) labels.push_back(i % 3 == 0 ? 1 : 0);
        const auto splits = stratified_kfold(labels, 5, 11);
        std::set<std::size_t> all;
        for (const auto& sp : splits) {
            for (std::size_t i : sp.test_indices) {
                REQUIRE(all.insert(i).second);  // disjoint
            }
            // train + test of one fold is the whole index set
            std::set<std::size_t> fold_union(sp.train_indices.begin(), sp.train_indices.end());
            fold_union.insert(sp.test_indices.begin(), sp.test_indices.end());
            REQUIRE(fold_union.size() == labels.size());
        }
        REQUIRE(all.size() == labels.size());
    }
    SECTION("Haberman proportions: 81 pos over 10 folds is 8 or 9") {
        std::vector<int> labels(306, 0);
        for (int i = 0; i < 81; ++i) labels[static_cast<std::size_t>(i)] = 1;
        const auto splits = stratified_kfold(labels, 10, 5);
        for (const auto& sp : splits) {
            std::size_t pos = 0;
            for (std::size_t i : sp.test_indices) pos += static_cast<std::size_t>(labels[i]);
            REQUIRE((pos == 8 || pos == 9));
        }
    }
    SECTION("class smaller than k errors") {
        std::vector<int> labels(20, 0);
        labels[0] = labels[1] = 1;
        REQUIRE_THROWS_AS(stratified_kfold(labels, 5, 0), InputError);
    }
    SECTION("deterministic under seed") {
        std::vector<int> labels;
        for (int i = 0; i < 50; ++i) labels.push_back(i % 4 == 0 ? 1 : 0);
        const auto a = stratified_kfold(labels, 5, 42);
        const auto b = stratified_kfold(labels, 5, 42);
        for (std::size_t f = 0; f < a.size(); ++f)
            REQUIRE(a[f].test_indices == b[f].test_indices);
    }
}

TEST_CASE("student t CDF matches the integration oracle") {
    for (double df : {1.0, 2.0, 3.0, 5.0, 10.0, 29.0, 100.0}) {
        for (double t : {0.0, 0.3, 1.0, 1.96, 2.5, 3.464, 5.0, -1.0, -2.5}) {
            REQUIRE(student_t_cdf(t, df) ==
                    Catch::Approx(oracle::oracle_t_cdf(t, df)).margin(1e-7));
        }
    }
    REQUIRE(student_t_cdf(0.0, 7.0) == Catch::Approx(0.5));
    REQUIRE(student_t_cdf(1.96, 100000.0) == Catch::Approx(0.975).margin(1e-3));
}

TEST_CASE("paired t-test") {
    SECTION("identical vectors are not significant") {
        const auto r = paired_t_test({0.5, 0.6, 0.7}, {0.5, 0.6, 0.7});
        REQUIRE(r.t_stat == 0.0);
        REQUIRE(!r.significant);
    }
    SECTION("worked example: differences (1,2,3)") {
        const auto r = paired_t_test({1.0, 2.0, 3.0}, {0.0, 0.0, 0.0});
        REQUIRE(r.t_stat == Catch::Approx(2.0 * std::sqrt(3.0)).epsilon(1e-12));
        REQUIRE(r.p_value == Catch::Approx(0.0742).margin(5e-4));
        REQUIRE(!r.significant);
    }
    SECTION("constant nonzero difference is significant with p zero") {
        const auto r = paired_t_test({2.0, 3.0, 4.0}, {1.0, 2.0, 3.0});
        REQUIRE(r.significant);
        REQUIRE(r.p_value == 0.0);
    }
    SECTION("antisymmetry") {
        const Vec a = {0.6, 0.7, 0.9, 0.55};
        const Vec b = {0.5, 0.75, 0.8, 0.5};
        const auto fwd = paired_t_test(a, b);
        const auto rev = paired_t_test(b, a);
        REQUIRE(fwd.t_stat == Catch::Approx(-rev.t_stat).epsilon(1e-12));
        REQUIRE(fwd.p_value == Catch::Approx(rev.p_value).epsilon(1e-12));
    }
    SECTION("length checks") {
        REQUIRE_THROWS_AS(paired_t_test({1.0}, {2.0}), InputError);
        REQUIRE_THROWS_AS(paired_t_test({1.0, 2.0}, {1.0}), InputError);
    }
}

TEST_CASE("aggregate") {
    SECTION("constant values") {
        const auto s = aggregate_values({0.5, 0.5, 0.5});
        REQUIRE(s.mean == 0.5);
        REQUIRE(*s.std_dev == 0.0);
    }
    SECTION("two-point sample std") {
        const auto s = aggregate_values({0.4, 0.6});
        REQUIRE(s.mean == Catch::Approx(0.5));
        REQUIRE(*s.std_dev == Catch::Approx(std::sqrt(0.02)));
    }
    SECTION("single value has no std") {
        const auto s = aggregate_values({0.3});
        REQUIRE(s.mean == 0.3);
        REQUIRE(!s.std_dev.has_value());
    }
    SECTION("fold metrics aggregate per metric") {
        std::vector<FoldMetrics> folds = {{0.8, 0.6, 0.7, 0.9, 0, 0}, {0.6, 0.8, 0.7, 0.7, 1, 0}};
        const auto agg = aggregate(folds);
        REQUIRE(agg.precision.mean == Catch::Approx(0.7));
        REQUIRE(agg.recall.mean == Catch::Approx(0.7));
        REQUIRE(agg.f1.mean == Catch::Approx(0.7));
        REQUIRE(agg.auc.mean == Catch::Approx(0.8));
    }
}
