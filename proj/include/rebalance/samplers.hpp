#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "rebalance/common.hpp"

namespace rebalance::samplers {

struct SamplerRequest {
    Matrix minority;            // w rows x n features
    Matrix majority;            // used by borderline / adasyn neighbor queries
    std::size_t deficit_d = 0;  // synthetic rows to produce
    std::size_t k_neighbors = 5;
    std::uint64_t rng_seed = 0;
};

struct SamplerResult {
    Matrix synthetic;  // deficit_d rows
    bool fallback_warning = false;
    std::string warning;
};

// k nearest rows to `points[query]` among `points`, self excluded.
// Distance ties break on lower row index.
inline std::vector<std::size_t> nearest_neighbors(const Matrix& points, std::size_t query,
                                                  std::size_t k) {
    const std::size_t n = points.cols();
    std::vector<std::pair<double, std::size_t>> dist;
    dist.reserve(points.rows() - 1);
    for (std::size_t i = 0; i < points.rows(); ++i) {
        if (i == query) continue;
        dist.emplace_back(squared_distance(points.row_ptr(query), points.row_ptr(i), n), i);
    }
    const std::size_t take = std::min(k, dist.size());
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(take), dist.end());
    std::vector<std::size_t> out(take);
    for (std::size_t i = 0; i < take; ++i) out[i] = dist[i].second;
    return out;
}

// Counts how many of the m nearest neighbors of minority[idx], searched over
// minority (self excluded) plus majority, belong to the majority class.
inline std::size_t majority_neighbor_count(const Matrix& minority, const Matrix& majority,
                                           std::size_t idx, std::size_t m) {
    const std::size_t n = minority.cols();
    std::vector<std::pair<double, std::size_t>> dist;  // index < w_min ⇒ minority
    dist.reserve(minority.rows() + majority.rows() - 1);
    for (std::size_t i = 0; i < minority.rows(); ++i) {
        if (i == idx) continue;
        dist.emplace_back(squared_distance(minority.row_ptr(idx), minority.row_ptr(i), n), i);
    }
    for (std::size_t i = 0; i < majority.rows(); ++i)
        dist.emplace_back(squared_distance(minority.row_ptr(idx), majority.row_ptr(i), n),
                          minority.rows() + i);
    const std::size_t take = std::min(m, dist.size());
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(take), dist.end());
    std::size_t count = 0;
    for (std::size_t i = 0; i < take; ++i)
        if (dist[i].second >= minority.rows()) ++count;
    return count;
}

inline void check_minority(const Matrix& minority) {
    if (minority.rows() < 2)
        throw InputError("sampler: need at least 2 minority instances, got " +
                         std::to_string(minority.rows()));
}

namespace detail {

// Interpolates deficit_d points: base drawn uniformly from `bases` (indices
// into minority), neighbor from the base's k nearest minority rows.
inline Matrix interpolate_from_bases(const Matrix& minority, const std::vector<std::size_t>& bases,
                                     std::size_t deficit_d, std::size_t k, Rng& rng) {
    const std::size_t k_eff = std::min(k, minority.rows() - 1);
    std::vector<std::vector<std::size_t>> knn(minority.rows());
    Matrix out(deficit_d, minority.cols());
    for (std::size_t s = 0; s < deficit_d; ++s) {
        const std::size_t base = bases[uniform_index(rng, bases.size())];
        if (knn[base].empty()) knn[base] = nearest_neighbors(minority, base, k_eff);
        const std::size_t nb = knn[base][uniform_index(rng, knn[base].size())];
        const double lambda = uniform01(rng);
        for (std::size_t j = 0; j < minority.cols(); ++j)
            out(s, j) = minority(base, j) + lambda * (minority(nb, j) - minority(base, j));
    }
    return out;
}

// Per-base generation counts summing exactly to deficit_d, proportional to
// weights, largest-remainder rounding with ties on lower index.
inline std::vector<std::size_t> largest_remainder_counts(const std::vector<double>& weights,
                                                         std::size_t deficit_d) {
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    std::vector<std::size_t> counts(weights.size(), 0);
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const double exact = static_cast<double>(deficit_d) * weights[i] / total;
        counts[i] = static_cast<std::size_t>(exact);
        assigned += counts[i];
        remainders.emplace_back(-(exact - static_cast<double>(counts[i])), i);
    }
    std::sort(remainders.begin(), remainders.end());
    for (std::size_t r = 0; assigned < deficit_d; ++r, ++assigned)
        ++counts[remainders[r % remainders.size()].second];
    return counts;
}

}  // namespace detail

inline SamplerResult smote(const SamplerRequest& req) {
    check_minority(req.minority);
    if (req.k_neighbors < 1) throw InputError("smote: k_neighbors must be >= 1");
    Rng rng(req.rng_seed);
    std::vector<std::size_t> all(req.minority.rows());
    std::iota(all.begin(), all.end(), std::size_t{0});
    return {detail::interpolate_from_bases(req.minority, all, req.deficit_d, req.k_neighbors, rng),
            false, {}};
}

// DANGER classification of Borderline-SMOTE-1: a minority point is a base
// iff m/2 <= (majority among its m nearest combined neighbors) < m.
inline std::vector<std::size_t> danger_set(const Matrix& minority, const Matrix& majority,
                                           std::size_t m_neighbors) {
    std::vector<std::size_t> danger;
    for (std::size_t i = 0; i < minority.rows(); ++i) {
        const std::size_t maj = majority_neighbor_count(minority, majority, i, m_neighbors);
        if (2 * maj >= m_neighbors && maj < m_neighbors) danger.push_back(i);
    }
    return danger;
}

inline SamplerResult borderline_smote(const SamplerRequest& req, std::size_t m_neighbors = 5) {
    check_minority(req.minority);
    if (req.majority.empty()) throw InputError("borderline_smote: majority set required");
    const auto danger = danger_set(req.minority, req.majority, m_neighbors);
    if (danger.empty()) {
        SamplerResult res = smote(req);
        res.fallback_warning = true;
        res.warning = "borderline_smote: empty DANGER set, fell back to plain SMOTE";
        return res;
    }
    Rng rng(req.rng_seed);
    return {detail::interpolate_from_bases(req.minority, danger, req.deficit_d, req.k_neighbors, rng),
            false, {}};
}

inline SamplerResult adasyn(const SamplerRequest& req) {
    check_minority(req.minority);
    const std::size_t w = req.minority.rows();
    std::vector<double> ratios(w, 0.0);
    for (std::size_t i = 0; i < w; ++i)
        ratios[i] = static_cast<double>(
                        majority_neighbor_count(req.minority, req.majority, i, req.k_neighbors)) /
                    static_cast<double>(req.k_neighbors);
    SamplerResult res;
    const double total = std::accumulate(ratios.begin(), ratios.end(), 0.0);
    if (total == 0.0) {
        std::fill(ratios.begin(), ratios.end(), 1.0);
        res.fallback_warning = true;
        res.warning = "adasyn: no majority instances near minority, uniform allocation";
    }
    const auto counts = detail::largest_remainder_counts(ratios, req.deficit_d);

    Rng rng(req.rng_seed);
    const std::size_t k_eff = std::min(req.k_neighbors, w - 1);
    res.synthetic = Matrix(req.deficit_d, req.minority.cols());
    std::size_t row = 0;
    for (std::size_t i = 0; i < w; ++i) {
        if (counts[i] == 0) continue;
        const auto knn = nearest_neighbors(req.minority, i, k_eff);
        for (std::size_t c = 0; c < counts[i]; ++c, ++row) {
            const std::size_t nb = knn[uniform_index(rng, knn.size())];
            const double lambda = uniform01(rng);
            for (std::size_t j = 0; j < req.minority.cols(); ++j)
                res.synthetic(row, j) =
                    req.minority(i, j) + lambda * (req.minority(nb, j) - req.minority(i, j));
        }
    }
    return res;
}

// Exposed for tests: ADASYN's count allocation.
inline std::vector<std::size_t> adasyn_counts(const std::vector<double>& ratios,
                                              std::size_t deficit_d) {
    return detail::largest_remainder_counts(ratios, deficit_d);
}

}  // namespace rebalance::samplers
