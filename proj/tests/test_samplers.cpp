#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "oracles.hpp"
#include "rebalance/data.hpp"
#include "rebalance/samplers.hpp"

using namespace rebalance;
using namespace rebalance::samplers;

namespace {

// distance from point to segment [a,b] plus the projection parameter
std::pair<double, double> segment_residual(const Vec& p, const Vec& a, const Vec& b) {
    double ab2 = 0.0, ap_ab = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        ab2 += (b[i] - a[i]) * (b[i] - a[i]);
        ap_ab += (p[i] - a[i]) * (b[i] - a[i]);
    }
    const double t = ab2 == 0.0 ? 0.0 : ap_ab / ab2;
    double res2 = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double proj = a[i] + t * (b[i] - a[i]);
        res2 += (p[i] - proj) * (p[i] - proj);
    }
    return {std::sqrt(res2), t};
}

Matrix random_points(std::size_t rows, std::size_t cols, Rng& rng, double shift = 0.0) {
    Matrix m(rows, cols);
    for (double& v : m.raw()) v = uniform01(rng) + shift;
    return m;
}

}  // namespace

TEST_CASE("smote output lies on segments between minority points") {
    Rng rng(3);
    const Matrix minority = random_points(12, 3, rng);
    SamplerRequest req{minority, {}, 200, 5, 99};
    const auto res = smote(req);
    REQUIRE(res.synthetic.rows() == 200);
    for (std::size_t s = 0; s < res.synthetic.rows(); ++s) {
        // membership in at least one minority-pair segment
        double best = 1e9;
        for (std::size_t i = 0; i < minority.rows(); ++i)
            for (std::size_t j = 0; j < minority.rows(); ++j) {
                if (i == j) continue;
                const auto [r, t] = segment_residual(res.synthetic.row(s), minority.row(i),
                                                     minority.row(j));
                if (t >= -1e-12 && t <= 1.0 + 1e-12) best = std::min(best, r);
            }
        REQUIRE(best < 1e-9);
    }
}

TEST_CASE("smote with two points stays on the connecting segment") {
    const Matrix minority = Matrix::from_rows({{0.0, 0.0}, {1.0, 2.0}});
    SamplerRequest req{minority, {}, 50, 1, 7};
    const auto res = smote(req);
    for (std::size_t s = 0; s < res.synthetic.rows(); ++s) {
        const auto [r, t] = segment_residual(res.synthetic.row(s), minority.row(0), minority.row(1));
        REQUIRE(r < 1e-12);
        REQUIRE(t >= 0.0);
        REQUIRE(t <= 1.0);
    }
}

TEST_CASE("smote count exactness and edge cases") {
    Rng rng(1);
    const Matrix minority = random_points(6, 2, rng);
    SECTION("deficit zero yields an empty matrix") {
        SamplerRequest req{minority, {}, 0, 5, 1};
        REQUIRE(smote(req).synthetic.rows() == 0);
    }
    SECTION("fewer than two minority rows is an error") {
        SamplerRequest req{Matrix(1, 2, 0.0), {}, 3, 5, 1};
        REQUIRE_THROWS_AS(smote(req), InputError);
    }
    SECTION("Pima-style deficit arithmetic") {
        REQUIRE(500 - 268 == 232);
        SamplerRequest req{random_points(268, 2, rng), {}, 232, 5, 1};
        REQUIRE(smote(req).synthetic.rows() == 232);
    }
}

TEST_CASE("smote determinism and seed sensitivity") {
    Rng rng(8);
    const Matrix minority = random_points(10, 4, rng);
    SamplerRequest req{minority, {}, 40, 3, 555};
    const auto a = smote(req);
    const auto b = smote(req);
    REQUIRE(a.synthetic == b.synthetic);
    req.rng_seed = 556;
    const auto c = smote(req);
    REQUIRE(!(a.synthetic == c.synthetic));
}

TEST_CASE("nearest_neighbors ties break on lower index") {
    const Matrix pts = Matrix::from_rows({{0.0}, {1.0}, {-1.0}, {2.0}});
    const auto nn = nearest_neighbors(pts, 0, 2);
    REQUIRE(nn == std::vector<std::size_t>{1, 2});  // both at distance 1, lower index first
}

TEST_CASE("nearest_neighbors agrees with the brute-force oracle") {
    Rng rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t w = 3 + uniform_index(rng, 20);
        const Matrix pts = random_points(w, 3, rng);
        const std::size_t q = uniform_index(rng, w);
        const std::size_t k = 1 + uniform_index(rng, w - 1);
        const auto got = nearest_neighbors(pts, q, k);
        auto expect = oracle::oracle_nearest(pts, pts.row(q), k + 1);
        expect.erase(std::find(expect.begin(), expect.end(), q));  // oracle includes self first
        expect.resize(k);
        REQUIRE(got == expect);
    }
}

TEST_CASE("borderline DANGER classification") {
    SECTION("minority point surrounded by majority is NOISE") {
        // one minority point, all m neighbors majority
        const Matrix minority = Matrix::from_rows({{0.0, 0.0}, {10.0, 10.0}, {10.1, 10.0}});
        Matrix majority(0, 2);
        for (double a = 0; a < 6; ++a)
            majority.push_row({0.1 * std::cos(a), 0.1 * std::sin(a)});
        const auto danger = danger_set(minority, majority, 5);
        REQUIRE(std::find(danger.begin(), danger.end(), 0u) == danger.end());
    }
    SECTION("minority point with zero majority neighbors is SAFE") {
        Rng rng(4);
        const Matrix minority = random_points(8, 2, rng);
        const Matrix majority = random_points(8, 2, rng, 100.0);  // far away
        REQUIRE(danger_set(minority, majority, 5).empty());
    }
    SECTION("agrees with the exhaustive oracle on random mixtures") {
        Rng rng(12);
        for (int trial = 0; trial < 50; ++trial) {
            const Matrix minority = random_points(6 + uniform_index(rng, 10), 2, rng);
            const Matrix majority = random_points(6 + uniform_index(rng, 10), 2, rng, 0.3);
            const std::size_t m = 3 + uniform_index(rng, 4);
            REQUIRE(danger_set(minority, majority, m) ==
                    oracle::oracle_danger_set(minority, majority, m));
        }
    }
}

TEST_CASE("borderline_smote bases come from the DANGER set") {
    // two blobs with a contact zone
    Rng rng(21);
    Matrix minority(0, 2), majority(0, 2);
    std::normal_distribution<double> g(0.0, 0.5);
    for (int i = 0; i < 30; ++i) minority.push_row({g(rng), g(rng)});
    for (int i = 0; i < 60; ++i) minority.push_row({g(rng) - 4.0, g(rng)});  // safe blob far left
    for (int i = 0; i < 60; ++i) majority.push_row({1.2 + g(rng), g(rng)});

    const auto danger = oracle::oracle_danger_set(minority, majority, 5);
    REQUIRE(!danger.empty());

    SamplerRequest req{minority, majority, 300, 5, 9};
    const auto res = borderline_smote(req, 5);
    REQUIRE(!res.fallback_warning);
    REQUIRE(res.synthetic.rows() == 300);
    // every synthetic point must sit on a segment anchored at a DANGER base
    for (std::size_t s = 0; s < res.synthetic.rows(); ++s) {
        bool ok = false;
        for (std::size_t base : danger) {
            for (std::size_t j = 0; j < minority.rows() && !ok; ++j) {
                if (j == base) continue;
                const auto [r, t] =
                    segment_residual(res.synthetic.row(s), minority.row(base), minority.row(j));
                ok = r < 1e-9 && t >= -1e-12 && t <= 1.0 + 1e-12;
            }
            if (ok) break;
        }
        REQUIRE(ok);
    }
}

TEST_CASE("borderline_smote falls back to SMOTE when DANGER is empty") {
    Rng rng(2);
    const Matrix minority = random_points(8, 2, rng);
    const Matrix majority = random_points(8, 2, rng, 50.0);
    SamplerRequest req{minority, majority, 20, 3, 77};
    const auto res = borderline_smote(req, 5);
    REQUIRE(res.fallback_warning);
    REQUIRE(res.synthetic.rows() == 20);
}

TEST_CASE("adasyn allocation counts") {
    SECTION("all weight on one point") {
        REQUIRE(adasyn_counts({1.0, 0.0}, 4) == std::vector<std::size_t>{4, 0});
    }
    SECTION("equal ratios split evenly") {
        REQUIRE(adasyn_counts({0.5, 0.5, 0.5, 0.5}, 12) ==
                std::vector<std::size_t>{3, 3, 3, 3});
    }
    SECTION("largest-remainder rounding") {
        REQUIRE(adasyn_counts({0.6, 0.4}, 5) == std::vector<std::size_t>{3, 2});
    }
}

TEST_CASE("adasyn produces exactly deficit_d rows and warns without majority pressure") {
    Rng rng(5);
    const Matrix minority = random_points(10, 2, rng);
    SECTION("normal operation") {
        const Matrix majority = random_points(30, 2, rng, 0.2);
        SamplerRequest req{minority, majority, 37, 5, 3};
        const auto res = adasyn(req);
        REQUIRE(res.synthetic.rows() == 37);
        REQUIRE(!res.fallback_warning);
    }
    SECTION("isolated minority falls back to uniform allocation") {
        const Matrix majority = random_points(30, 2, rng, 90.0);
        SamplerRequest req{minority, majority, 37, 5, 3};
        const auto res = adasyn(req);
        REQUIRE(res.synthetic.rows() == 37);
        REQUIRE(res.fallback_warning);
    }
}
