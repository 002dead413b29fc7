#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "rebalance/common.hpp"

namespace rebalance::metrics {

struct ConfusionCounts {
    std::size_t tp = 0, fn = 0, fp = 0, tn = 0;
};

struct FoldMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double auc = 0.0;
    std::size_t fold_index = 0;
    std::size_t repeat_index = 0;
};

inline ConfusionCounts confusion(const std::vector<int>& y_true, const std::vector<int>& y_pred) {
    if (y_true.size() != y_pred.size() || y_true.empty())
        throw InputError("confusion: label vectors must be equal nonzero length");
    ConfusionCounts c;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        if (y_true[i] == 1)
            y_pred[i] == 1 ? ++c.tp : ++c.fn;
        else
            y_pred[i] == 1 ? ++c.fp : ++c.tn;
    }
    return c;
}

struct Prf {
    double precision, recall, f1;
};

// Degenerate denominators resolve to 0 rather than NaN.
inline Prf precision_recall_f1(const ConfusionCounts& c) {
    const double tp = static_cast<double>(c.tp);
    const double precision = c.tp + c.fp == 0 ? 0.0 : tp / static_cast<double>(c.tp + c.fp);
    const double recall = c.tp + c.fn == 0 ? 0.0 : tp / static_cast<double>(c.tp + c.fn);
    const double f1 =
        precision + recall == 0.0 ? 0.0 : 2.0 * recall * precision / (recall + precision);
    return {precision, recall, f1};
}

// Rank-based AUC (Mann-Whitney, ties half-credit) via average ranks.
inline double auc(const std::vector<int>& y_true, const Vec& scores) {
    if (y_true.size() != scores.size()) throw InputError("auc: length mismatch");
    std::size_t pos = 0;
    for (int y : y_true) pos += static_cast<std::size_t>(y == 1);
    const std::size_t neg = y_true.size() - pos;
    if (pos == 0 || neg == 0) throw InputError("auc: undefined for single-class truth");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    double pos_rank_sum = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
        const double avg_rank = 0.5 * static_cast<double>(i + j + 1);  // 1-based
        for (std::size_t k = i; k < j; ++k)
            if (y_true[order[k]] == 1) pos_rank_sum += avg_rank;
        i = j;
    }
    const double p = static_cast<double>(pos), n = static_cast<double>(neg);
    return (pos_rank_sum - p * (p + 1.0) / 2.0) / (p * n);
}

struct FoldSplit {
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> test_indices;
};

// Stratified k-fold: per-class shuffled round-robin deal, so fold class
// counts stay within one instance of the exact proportion.
inline std::vector<FoldSplit> stratified_kfold(const std::vector<int>& labels, std::size_t k,
                                               std::uint64_t seed) {
    if (k < 2) throw InputError("stratified_kfold: k must be >= 2");
    std::vector<std::size_t> pos_idx, neg_idx;
    for (std::size_t i = 0; i < labels.size(); ++i)
        (labels[i] == 1 ? pos_idx : neg_idx).push_back(i);
    if (pos_idx.size() < k || neg_idx.size() < k)
        throw InputError("stratified_kfold: a class has fewer than k=" + std::to_string(k) +
                         " members");
    Rng rng(seed);
    std::shuffle(pos_idx.begin(), pos_idx.end(), rng);
    std::shuffle(neg_idx.begin(), neg_idx.end(), rng);

    std::vector<std::vector<std::size_t>> fold_members(k);
    for (std::size_t i = 0; i < pos_idx.size(); ++i) fold_members[i % k].push_back(pos_idx[i]);
    for (std::size_t i = 0; i < neg_idx.size(); ++i) fold_members[i % k].push_back(neg_idx[i]);

    std::vector<FoldSplit> splits(k);
    for (std::size_t f = 0; f < k; ++f) {
        std::sort(fold_members[f].begin(), fold_members[f].end());
        splits[f].test_indices = fold_members[f];
        for (std::size_t g = 0; g < k; ++g)
            if (g != f)
                splits[f].train_indices.insert(splits[f].train_indices.end(),
                                               fold_members[g].begin(), fold_members[g].end());
        std::sort(splits[f].train_indices.begin(), splits[f].train_indices.end());
    }
    return splits;
}

namespace detail {

// Regularized incomplete beta I_x(a,b), Lentz continued fraction.
inline double betacf(double a, double b, double x) {
    constexpr int max_iter = 300;
    constexpr double eps = 3e-14;
    constexpr double fpmin = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0, d = 1.0 - qab * x / qap;
    if (std::fabs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) break;
    }
    return h;
}

inline double incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log(1.0 - x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

}  // namespace detail

// Student-t CDF at t with df degrees of freedom.
inline double student_t_cdf(double t, double df) {
    if (df < 1.0) throw InputError("student_t_cdf: df must be >= 1");
    if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
    const double x = df / (df + t * t);
    const double tail = 0.5 * detail::incomplete_beta(df / 2.0, 0.5, x);
    return t >= 0.0 ? 1.0 - tail : tail;
}

struct TTestResult {
    double t_stat;
    double p_value;
    bool significant;
};

// Two-tailed paired t-test. Zero-variance differences degenerate by
// convention: nonzero mean ⇒ significant with p = 0, zero mean ⇒ t = 0, p = 1.
inline TTestResult paired_t_test(const Vec& a, const Vec& b, double alpha = 0.05) {
    if (a.size() != b.size() || a.size() < 2)
        throw InputError("paired_t_test: need equal lengths >= 2");
    const std::size_t n = a.size();
    Vec diff(n);
    for (std::size_t i = 0; i < n; ++i) diff[i] = a[i] - b[i];
    const double mean = std::accumulate(diff.begin(), diff.end(), 0.0) / static_cast<double>(n);
    double var = 0.0;
    for (double d : diff) var += (d - mean) * (d - mean);
    var /= static_cast<double>(n - 1);
    if (var == 0.0) {
        if (mean == 0.0) return {0.0, 1.0, false};
        return {mean > 0 ? std::numeric_limits<double>::infinity()
                         : -std::numeric_limits<double>::infinity(),
                0.0, true};
    }
    const double t = mean / std::sqrt(var / static_cast<double>(n));
    const double p = 2.0 * (1.0 - student_t_cdf(std::fabs(t), static_cast<double>(n - 1)));
    return {t, p, p < alpha};
}

struct MetricSummary {
    double mean = 0.0;
    std::optional<double> std_dev;  // absent with fewer than 2 samples
};

inline MetricSummary aggregate_values(const Vec& values) {
    if (values.empty()) throw InputError("aggregate: empty value list");
    const double mean =
        std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    if (values.size() < 2) return {mean, std::nullopt};
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(values.size() - 1);
    return {mean, std::sqrt(var)};
}

struct AggregateMetrics {
    MetricSummary precision, recall, f1, auc;
};

inline AggregateMetrics aggregate(const std::vector<FoldMetrics>& folds) {
    if (folds.empty()) throw InputError("aggregate: no fold metrics");
    Vec p, r, f, a;
    for (const auto& m : folds) {
        p.push_back(m.precision);
        r.push_back(m.recall);
        f.push_back(m.f1);
        a.push_back(m.auc);
    }
    return {aggregate_values(p), aggregate_values(r), aggregate_values(f), aggregate_values(a)};
}

}  // namespace rebalance::metrics
