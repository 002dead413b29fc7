#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <vector>

#include "rebalance/common.hpp"

namespace rebalance::tree {

struct TreeParams {
    std::size_t max_depth = std::numeric_limits<std::size_t>::max();
    std::size_t min_leaf_size = 2;
    double min_gain_ratio = 0.0;
};

struct TreeNode {
    // leaf when left == nullptr
    std::size_t feature_index = 0;
    double threshold = 0.0;
    std::unique_ptr<TreeNode> left, right;
    std::size_t pos_count = 0;
    std::size_t neg_count = 0;

    bool is_leaf() const { return left == nullptr; }
};

namespace detail {

inline double entropy(std::size_t pos, std::size_t neg) {
    const double total = static_cast<double>(pos + neg);
    double h = 0.0;
    if (pos > 0) {
        const double p = static_cast<double>(pos) / total;
        h -= p * std::log2(p);
    }
    if (neg > 0) {
        const double q = static_cast<double>(neg) / total;
        h -= q * std::log2(q);
    }
    return h;
}

struct SplitChoice {
    bool found = false;
    std::size_t feature = 0;
    double threshold = 0.0;
    double gain = 0.0;
    double gain_ratio = 0.0;
};

// Best axis-aligned split by gain ratio over midpoint thresholds. Ties break
// on lower feature index, then lower threshold (scan order guarantees both).
inline SplitChoice best_split(const Matrix& features, const std::vector<int>& labels,
                              const std::vector<std::size_t>& rows, const TreeParams& params) {
    const std::size_t total = rows.size();
    std::size_t total_pos = 0;
    for (std::size_t r : rows) total_pos += static_cast<std::size_t>(labels[r]);
    const double parent_entropy = entropy(total_pos, total - total_pos);

    SplitChoice best;
    std::vector<std::pair<double, int>> column(total);
    for (std::size_t f = 0; f < features.cols(); ++f) {
        for (std::size_t i = 0; i < total; ++i)
            column[i] = {features(rows[i], f), labels[rows[i]]};
        std::sort(column.begin(), column.end());

        std::size_t left_pos = 0, left_n = 0;
        for (std::size_t i = 0; i + 1 < total; ++i) {
            left_pos += static_cast<std::size_t>(column[i].second);
            ++left_n;
            if (column[i].first == column[i + 1].first) continue;
            const std::size_t right_n = total - left_n;
            if (left_n < params.min_leaf_size || right_n < params.min_leaf_size) continue;
            const std::size_t right_pos = total_pos - left_pos;
            const double wl = static_cast<double>(left_n) / static_cast<double>(total);
            const double wr = static_cast<double>(right_n) / static_cast<double>(total);
            const double gain = parent_entropy - wl * entropy(left_pos, left_n - left_pos) -
                                wr * entropy(right_pos, right_n - right_pos);
            const double split_entropy = -wl * std::log2(wl) - wr * std::log2(wr);
            if (gain <= 1e-12 || split_entropy <= 0.0) continue;
            const double ratio = gain / split_entropy;
            if (ratio <= best.gain_ratio + 1e-15 && best.found) continue;
            best.found = true;
            best.feature = f;
            best.threshold = 0.5 * (column[i].first + column[i + 1].first);
            best.gain = gain;
            best.gain_ratio = ratio;
        }
    }
    return best;
}

inline std::unique_ptr<TreeNode> build(const Matrix& features, const std::vector<int>& labels,
                                       const std::vector<std::size_t>& rows,
                                       const TreeParams& params, std::size_t depth) {
    auto node = std::make_unique<TreeNode>();
    for (std::size_t r : rows)
        labels[r] ? ++node->pos_count : ++node->neg_count;

    const bool pure = node->pos_count == 0 || node->neg_count == 0;
    if (pure || depth >= params.max_depth || rows.size() < 2 * params.min_leaf_size)
        return node;

    const SplitChoice split = best_split(features, labels, rows, params);
    if (!split.found || split.gain_ratio < params.min_gain_ratio) return node;

    std::vector<std::size_t> left_rows, right_rows;
    for (std::size_t r : rows)
        (features(r, split.feature) <= split.threshold ? left_rows : right_rows).push_back(r);

    node->feature_index = split.feature;
    node->threshold = split.threshold;
    node->left = build(features, labels, left_rows, params, depth + 1);
    node->right = build(features, labels, right_rows, params, depth + 1);
    return node;
}

}  // namespace detail

struct Tree {
    std::unique_ptr<TreeNode> root;
    std::size_t feature_width = 0;
};

inline Tree train_tree(const Matrix& features, const std::vector<int>& labels,
                       const TreeParams& params = {}) {
    if (features.rows() == 0) throw InputError("train_tree: empty training set");
    if (features.rows() != labels.size())
        throw InputError("train_tree: feature/label row counts differ");
    if (params.min_leaf_size < 1) throw ConfigError("train_tree: min_leaf_size must be >= 1");
    for (int y : labels)
        if (y != 0 && y != 1) throw InputError("train_tree: labels must be 0/1");
    std::vector<std::size_t> rows(features.rows());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    return {detail::build(features, labels, rows, params, 0), features.cols()};
}

// Laplace-smoothed positive rate of the reached leaf.
inline double predict_proba(const Tree& tree, const Vec& x) {
    if (x.size() != tree.feature_width) throw InputError("predict_proba: feature width mismatch");
    const TreeNode* node = tree.root.get();
    while (!node->is_leaf())
        node = x[node->feature_index] <= node->threshold ? node->left.get() : node->right.get();
    return (static_cast<double>(node->pos_count) + 1.0) /
           (static_cast<double>(node->pos_count + node->neg_count) + 2.0);
}

// Ties at 0.5 go to the positive class.
inline int predict_label(const Tree& tree, const Vec& x) {
    return predict_proba(tree, x) >= 0.5 ? 1 : 0;
}

}  // namespace rebalance::tree
