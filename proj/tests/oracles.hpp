// Deliberately naive brute-force oracles. These share no code with the
// production implementations they cross-check and favor clarity over speed.
#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "rebalance/common.hpp"

namespace rebalance::oracle {

// Exhaustive pos x neg pair scan, ties half-credit. Sizes <= ~1000.
inline double oracle_auc(const std::vector<int>& y_true, const Vec& scores) {
    std::size_t pos = 0, neg = 0;
    for (int y : y_true) (y == 1 ? pos : neg)++;
    if (pos == 0 || neg == 0) throw InputError("oracle_auc: single-class truth");
    double concordant = 0.0;
    for (std::size_t p = 0; p < y_true.size(); ++p) {
        if (y_true[p] != 1) continue;
        for (std::size_t n = 0; n < y_true.size(); ++n) {
            if (y_true[n] == 1) continue;
            if (scores[p] > scores[n])
                concordant += 1.0;
            else if (scores[p] == scores[n])
                concordant += 0.5;
        }
    }
    return concordant / (static_cast<double>(pos) * static_cast<double>(neg));
}

// Full distance sort, distance ties broken by lower index.
inline std::vector<std::size_t> oracle_nearest(const Matrix& points, const Vec& query,
                                               std::size_t k) {
    std::vector<std::pair<double, std::size_t>> dist;
    for (std::size_t i = 0; i < points.rows(); ++i)
        dist.emplace_back(squared_distance(points.row_ptr(i), query.data(), query.size()), i);
    std::sort(dist.begin(), dist.end());
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < std::min(k, dist.size()); ++i) out.push_back(dist[i].second);
    return out;
}

// Exhaustive Borderline DANGER classification: m/2 <= majority-neighbor
// count < m over the combined set (self excluded).
inline std::vector<std::size_t> oracle_danger_set(const Matrix& minority, const Matrix& majority,
                                                  std::size_t m) {
    std::vector<std::size_t> danger;
    for (std::size_t q = 0; q < minority.rows(); ++q) {
        std::vector<std::pair<double, std::size_t>> dist;  // combined index; >= w ⇒ majority
        for (std::size_t i = 0; i < minority.rows(); ++i) {
            if (i == q) continue;
            dist.emplace_back(
                squared_distance(minority.row_ptr(q), minority.row_ptr(i), minority.cols()), i);
        }
        for (std::size_t i = 0; i < majority.rows(); ++i)
            dist.emplace_back(
                squared_distance(minority.row_ptr(q), majority.row_ptr(i), minority.cols()),
                minority.rows() + i);
        std::sort(dist.begin(), dist.end());
        std::size_t maj = 0;
        for (std::size_t i = 0; i < std::min(m, dist.size()); ++i)
            if (dist[i].second >= minority.rows()) ++maj;
        if (2 * maj >= m && maj < m) danger.push_back(q);
    }
    return danger;
}

namespace detail {

inline double t_density(double x, double df) {
    const double c = std::exp(std::lgamma((df + 1.0) / 2.0) - std::lgamma(df / 2.0)) /
                     std::sqrt(df * 3.14159265358979323846);
    return c * std::pow(1.0 + x * x / df, -(df + 1.0) / 2.0);
}

inline double adaptive_simpson(double a, double b, double fa, double fm, double fb, double whole,
                               double eps, double df, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = t_density(lm, df), frm = t_density(rm, df);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::fabs(left + right - whole) < 15.0 * eps)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(a, m, fa, flm, fm, left, eps / 2.0, df, depth - 1) +
           adaptive_simpson(m, b, fm, frm, fb, right, eps / 2.0, df, depth - 1);
}

}  // namespace detail

// Numeric integration of the t-density, absolute error < 1e-9.
inline double oracle_t_cdf(double t, double df) {
    if (df < 1.0) throw InputError("oracle_t_cdf: df must be >= 1");
    if (t < 0.0) return 1.0 - oracle_t_cdf(-t, df);
    const double a = 0.0, b = t;
    if (b == a) return 0.5;
    const double fa = detail::t_density(a, df);
    const double fb = detail::t_density(b, df);
    const double fm = detail::t_density(0.5 * (a + b), df);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return 0.5 + detail::adaptive_simpson(a, b, fa, fm, fb, whole, 1e-10, df, 40);
}

}  // namespace rebalance::oracle
