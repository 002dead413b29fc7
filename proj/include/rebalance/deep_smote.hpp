#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

#include "rebalance/common.hpp"
#include "rebalance/nn.hpp"
#include "rebalance/samplers.hpp"

namespace rebalance::deep_smote {

// Distinct unordered pair capacity of a w-point minority set: C(w,2).
inline std::size_t pair_capacity(std::size_t w) {
    if (w < 2) throw InputError("pair_capacity: need w >= 2");
    return w * (w - 1) / 2;
}

struct PairBatch {
    std::vector<std::pair<std::size_t, std::size_t>> pairs_u;  // (s, t), s != t
    Matrix x_prime;     // T x 2n concatenations
    Matrix y_prime;     // T x n interpolated targets
    Vec lambda_draws;   // T values in [0,1]
};

struct DeepSmoteModel {
    nn::MlpModel net;  // input 2n, output n
    std::size_t feature_dim_n = 0;
};

namespace detail {

inline void emit_pair(PairBatch& batch, const Matrix& minority, std::size_t s, std::size_t t,
                      double lambda, bool swap_order) {
    if (swap_order) std::swap(s, t);
    const std::size_t n = minority.cols();
    Vec x(2 * n), y(n);
    for (std::size_t j = 0; j < n; ++j) {
        x[j] = minority(s, j);
        x[n + j] = minority(t, j);
        y[j] = minority(s, j) + lambda * (minority(t, j) - minority(s, j));
    }
    batch.pairs_u.emplace_back(s, t);
    batch.x_prime.push_row(x);
    batch.y_prime.push_row(y);
    batch.lambda_draws.push_back(lambda);
}

// All unordered pairs of {0..w-1} or, in neighborhood mode, all (i, j) edges
// of the k-NN graph (deduplicated as unordered pairs).
inline std::vector<std::pair<std::size_t, std::size_t>> candidate_pairs(const Matrix& minority,
                                                                        bool neighborhood_mode,
                                                                        std::size_t k_neighbors) {
    const std::size_t w = minority.rows();
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    if (!neighborhood_mode) {
        pairs.reserve(pair_capacity(w));
        for (std::size_t s = 0; s + 1 < w; ++s)
            for (std::size_t t = s + 1; t < w; ++t) pairs.emplace_back(s, t);
        return pairs;
    }
    const std::size_t k_eff = std::min(k_neighbors, w - 1);
    for (std::size_t i = 0; i < w; ++i)
        for (std::size_t j : samplers::nearest_neighbors(minority, i, k_eff))
            pairs.emplace_back(std::min(i, j), std::max(i, j));
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    return pairs;
}

}  // namespace detail

// Algorithm: sample t_count pairs from the minority set, concatenate each
// pair and interpolate a target on its segment with lambda ~ U(0,1). Pairs
// are distinct while capacity lasts; beyond C(w,2) pairs are re-drawn with
// replacement, each with a fresh lambda. Concatenation order is randomized
// per pair.
inline PairBatch build_pair_batch(const Matrix& minority, std::size_t t_count,
                                  std::uint64_t rng_seed, bool neighborhood_mode = false,
                                  std::size_t k_neighbors = 5) {
    if (minority.rows() < 2)
        throw InputError("build_pair_batch: need at least 2 minority instances");
    if (t_count < 1) throw InputError("build_pair_batch: t_count must be >= 1");

    Rng rng(rng_seed);
    auto pool = detail::candidate_pairs(minority, neighborhood_mode, k_neighbors);
    std::shuffle(pool.begin(), pool.end(), rng);

    PairBatch batch;
    batch.x_prime = Matrix(0, 0);
    batch.y_prime = Matrix(0, 0);
    const std::size_t distinct = std::min(t_count, pool.size());
    for (std::size_t i = 0; i < distinct; ++i)
        detail::emit_pair(batch, minority, pool[i].first, pool[i].second, uniform01(rng),
                          uniform01(rng) < 0.5);
    for (std::size_t i = distinct; i < t_count; ++i) {
        const auto& p = pool[uniform_index(rng, pool.size())];
        detail::emit_pair(batch, minority, p.first, p.second, uniform01(rng),
                          uniform01(rng) < 0.5);
    }
    return batch;
}

struct DeepSmoteConfig {
    std::size_t t_count = 2000;
    std::vector<std::size_t> hidden = {32, 16};
    nn::TrainConfig train;
    bool neighborhood_mode = false;  // restrict pairs to the minority k-NN graph
    std::size_t k_neighbors = 5;
};

inline DeepSmoteModel train_deep_smote(const Matrix& minority, const DeepSmoteConfig& cfg,
                                       std::uint64_t rng_seed) {
    const std::size_t n = minority.cols();
    const PairBatch batch = build_pair_batch(minority, cfg.t_count, rng_seed,
                                             cfg.neighborhood_mode, cfg.k_neighbors);
    std::vector<nn::LayerSpec> specs;
    std::size_t prev = 2 * n;
    for (std::size_t h : cfg.hidden) {
        specs.push_back({prev, h, nn::Activation::relu});
        prev = h;
    }
    specs.push_back({prev, n, nn::Activation::linear});
    nn::MlpModel net = nn::mlp_init(specs, derive_seed(rng_seed, "deep_smote/init"));
    nn::TrainConfig train_cfg = cfg.train;
    train_cfg.shuffle_seed = derive_seed(rng_seed, "deep_smote/shuffle");
    net = nn::mse_train(std::move(net), batch.x_prime, batch.y_prime, train_cfg);
    return {std::move(net), n};
}

// Runs `model` on deficit_d random concatenated pairs and merges the
// predictions after the original minority rows.
inline Matrix oversample_deep_smote(const Matrix& minority, const DeepSmoteModel& model,
                                    std::size_t deficit_d, std::uint64_t rng_seed) {
    if (minority.cols() != model.feature_dim_n)
        throw InputError("oversample_deep_smote: feature dimension mismatch");
    if (minority.rows() < 2)
        throw InputError("oversample_deep_smote: need at least 2 minority instances");
    const std::size_t w = minority.rows();
    const std::size_t n = minority.cols();
    Matrix out(0, n);
    for (std::size_t i = 0; i < w; ++i) out.push_row(minority.row_ptr(i), n);
    Rng rng(rng_seed);
    Vec x(2 * n);
    for (std::size_t d = 0; d < deficit_d; ++d) {
        const std::size_t s = uniform_index(rng, w);
        std::size_t t = uniform_index(rng, w - 1);
        if (t >= s) ++t;
        for (std::size_t j = 0; j < n; ++j) {
            x[j] = minority(s, j);
            x[n + j] = minority(t, j);
        }
        out.push_row(nn::mlp_forward(model.net, x));
    }
    return out;
}

}  // namespace rebalance::deep_smote
