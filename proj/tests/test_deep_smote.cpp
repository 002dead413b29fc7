#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "rebalance/deep_smote.hpp"

using namespace rebalance;
using namespace rebalance::deep_smote;

namespace {

Matrix random_points(std::size_t rows, std::size_t cols, Rng& rng) {
    Matrix m(rows, cols);
    for (double& v : m.raw()) v = uniform01(rng);
    return m;
}

}  // namespace

TEST_CASE("pair capacity is the binomial coefficient") {
    REQUIRE(pair_capacity(2) == 1);
    REQUIRE(pair_capacity(5) == 10);
    REQUIRE(pair_capacity(268) == 35778);
    REQUIRE_THROWS_AS(pair_capacity(1), InputError);
}

TEST_CASE("build_pair_batch respects the PairBatch invariants") {
    Rng rng(6);
    const Matrix minority = random_points(9, 4, rng);
    const auto batch = build_pair_batch(minority, 30, 17);
    REQUIRE(batch.pairs_u.size() == 30);
    REQUIRE(batch.x_prime.rows() == 30);
    REQUIRE(batch.x_prime.cols() == 8);
    REQUIRE(batch.y_prime.cols() == 4);

    for (std::size_t i = 0; i < batch.pairs_u.size(); ++i) {
        const auto [s, t] = batch.pairs_u[i];
        REQUIRE(s != t);
        // x_prime row is concat(x_s, x_t)
        for (std::size_t j = 0; j < 4; ++j) {
            REQUIRE(batch.x_prime(i, j) == minority(s, j));
            REQUIRE(batch.x_prime(i, 4 + j) == minority(t, j));
        }
        // y_prime row sits on the pair's segment at lambda
        const double lambda = batch.lambda_draws[i];
        REQUIRE(lambda >= 0.0);
        REQUIRE(lambda <= 1.0);
        double res2 = 0.0;
        for (std::size_t j = 0; j < 4; ++j) {
            const double expect = minority(s, j) + lambda * (minority(t, j) - minority(s, j));
            res2 += (batch.y_prime(i, j) - expect) * (batch.y_prime(i, j) - expect);
        }
        REQUIRE(std::sqrt(res2) < 1e-9);
    }
}

TEST_CASE("pairs are distinct while capacity lasts") {
    Rng rng(7);
    for (std::size_t w : {3u, 5u, 8u, 12u}) {
        const Matrix minority = random_points(w, 2, rng);
        const std::size_t cap = pair_capacity(w);
        const auto batch = build_pair_batch(minority, cap, 11);
        std::set<std::pair<std::size_t, std::size_t>> seen;
        for (auto [s, t] : batch.pairs_u) seen.insert({std::min(s, t), std::max(s, t)});
        REQUIRE(seen.size() == cap);
    }
}

TEST_CASE("t_count beyond capacity re-samples with fresh lambdas") {
    Rng rng(8);
    const Matrix minority = random_points(4, 2, rng);  // capacity 6
    const auto batch = build_pair_batch(minority, 20, 3);
    REQUIRE(batch.pairs_u.size() == 20);
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (auto [s, t] : batch.pairs_u) seen.insert({std::min(s, t), std::max(s, t)});
    REQUIRE(seen.size() == 6);
    // lambdas beyond capacity are fresh draws, so duplicated pairs still
    // yield distinct training rows
    std::set<double> lambdas(batch.lambda_draws.begin(), batch.lambda_draws.end());
    REQUIRE(lambdas.size() > 6);
}

TEST_CASE("single-pair batch on two points") {
    const Matrix minority = Matrix::from_rows({{0.0, 1.0}, {1.0, 3.0}});
    const auto batch = build_pair_batch(minority, 1, 5);
    REQUIRE(batch.pairs_u.size() == 1);
    const double lambda = batch.lambda_draws[0];
    const auto [s, t] = batch.pairs_u[0];
    for (std::size_t j = 0; j < 2; ++j)
        REQUIRE(batch.y_prime(0, j) ==
                Catch::Approx(minority(s, j) + lambda * (minority(t, j) - minority(s, j))));
}

TEST_CASE("WBC-sized batch has the 2n/n dimensional contract") {
    Rng rng(10);
    const Matrix minority = random_points(200, 9, rng);
    const auto batch = build_pair_batch(minority, 12000, 1);
    REQUIRE(batch.x_prime.rows() == 12000);
    REQUIRE(batch.x_prime.cols() == 18);
    REQUIRE(batch.y_prime.rows() == 12000);
    REQUIRE(batch.y_prime.cols() == 9);
    REQUIRE(batch.x_prime.cols() == 2 * batch.y_prime.cols());
}

TEST_CASE("build_pair_batch rejects degenerate minority sets") {
    REQUIRE_THROWS_AS(build_pair_batch(Matrix(1, 3, 0.0), 5, 0), InputError);
}

TEST_CASE("neighborhood mode only pairs k-NN related points") {
    // two far-apart clusters: cross-cluster pairs must not appear
    Matrix minority(0, 2);
    for (double x : {0.0, 0.1, 0.2}) minority.push_row({x, 0.0});
    for (double x : {100.0, 100.1, 100.2}) minority.push_row({x, 0.0});
    const auto batch = build_pair_batch(minority, 6, 4, true, 2);
    for (auto [s, t] : batch.pairs_u) {
        const bool s_left = s < 3, t_left = t < 3;
        REQUIRE(s_left == t_left);
    }
}

TEST_CASE("train_deep_smote builds the [2n, hidden..., n] architecture") {
    Rng rng(13);
    const Matrix minority = random_points(20, 9, rng);
    DeepSmoteConfig cfg;
    cfg.t_count = 100;
    cfg.hidden = {48, 32, 16};
    cfg.train.epochs = 2;
    const auto model = train_deep_smote(minority, cfg, 1);
    REQUIRE(model.feature_dim_n == 9);
    REQUIRE(model.net.input_width() == 18);
    REQUIRE(model.net.output_width() == 9);
    REQUIRE(model.net.layers.size() == 4);
    REQUIRE(model.net.layers[0].spec.output_width == 48);
    REQUIRE(model.net.layers[1].spec.output_width == 32);
    REQUIRE(model.net.layers[2].spec.output_width == 16);
}

TEST_CASE("a single hidden width works (Haberman-style)") {
    Rng rng(14);
    const Matrix minority = random_points(15, 3, rng);
    DeepSmoteConfig cfg;
    cfg.t_count = 80;
    cfg.hidden = {3};
    cfg.train.epochs = 2;
    const auto model = train_deep_smote(minority, cfg, 2);
    REQUIRE(model.net.input_width() == 6);
    REQUIRE(model.net.output_width() == 3);
}

TEST_CASE("oversample_deep_smote merge contract") {
    Rng rng(15);
    const Matrix minority = random_points(12, 3, rng);
    DeepSmoteConfig cfg;
    cfg.t_count = 60;
    cfg.hidden = {8};
    cfg.train.epochs = 3;
    const auto model = train_deep_smote(minority, cfg, 3);

    SECTION("deficit zero returns the minority unchanged") {
        const auto out = oversample_deep_smote(minority, model, 0, 9);
        REQUIRE(out == minority);
    }
    SECTION("balance: output rows equal w + deficit") {
        const auto out = oversample_deep_smote(minority, model, 25, 9);
        REQUIRE(out.rows() == 12 + 25);
        REQUIRE(out.cols() == 3);
        // originals come first
        for (std::size_t r = 0; r < 12; ++r)
            for (std::size_t c = 0; c < 3; ++c) REQUIRE(out(r, c) == minority(r, c));
    }
    SECTION("frozen model and fixed seed is a pure function") {
        const auto a = oversample_deep_smote(minority, model, 25, 9);
        const auto b = oversample_deep_smote(minority, model, 25, 9);
        REQUIRE(a == b);
        const auto c = oversample_deep_smote(minority, model, 25, 10);
        REQUIRE(!(a == c));
    }
    SECTION("dimension mismatch is rejected") {
        const Matrix wrong = random_points(5, 4, rng);
        REQUIRE_THROWS_AS(oversample_deep_smote(wrong, model, 3, 0), InputError);
    }
}
