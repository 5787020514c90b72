#pragma once

// Reference implementations written straight from the definitions, with no
// shared code paths into the library beyond its data types.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "pnet/kernel.hpp"
#include "pnet/scoring.hpp"
#include "pnet/threshold.hpp"

namespace pnet::oracle {

/// Score of node i from row `k` with label masks; j = `skip` is left out of
/// every sum and max while the positive count used by `average` is the full
/// positive count. Pass skip = SIZE_MAX to use every entry.
inline double score(const std::vector<double>& k, const std::vector<bool>& pos, const std::vector<bool>& neg,
                    ScoreKind kind, std::size_t knn_k, std::size_t skip = static_cast<std::size_t>(-1)) {
    const std::size_t n = k.size();
    std::size_t n_pos = 0;
    for (std::size_t j = 0; j < n; ++j) n_pos += pos[j] ? 1 : 0;
    double sp = 0, sn = 0;
    std::vector<std::pair<double, std::size_t>> pos_w;
    for (std::size_t j = 0; j < n; ++j) {
        if (j == skip) continue;
        if (pos[j]) {
            sp += k[j];
            pos_w.emplace_back(k[j], j);
        }
        if (neg[j]) sn += k[j];
    }
    switch (kind) {
        case ScoreKind::average: return sp / static_cast<double>(n_pos);
        case ScoreKind::nearest: {
            double best = -std::numeric_limits<double>::infinity();
            for (auto& [w, j] : pos_w) best = std::max(best, w);
            return pos_w.empty() ? 0.0 : best;
        }
        case ScoreKind::knn: {
            std::sort(pos_w.begin(), pos_w.end(), [](auto& a, auto& b) {
                return a.first != b.first ? a.first > b.first : a.second < b.second;
            });
            double s = 0;
            for (std::size_t t = 0; t < std::min(knn_k, pos_w.size()); ++t) s += pos_w[t].first;
            return s;
        }
        case ScoreKind::total: return sp + sn == 0 ? 0.0 : sp / (sp + sn);
        case ScoreKind::diff: return sp - sn;
        case ScoreKind::dnorm: return sp + sn == 0 ? 0.0 : (sp - sn) / (sp + sn);
    }
    return 0;
}

/// Mann-Whitney by explicit pair counting.
inline double auc(const std::vector<double>& s, const std::vector<bool>& y) {
    double wins = 0;
    double pairs = 0;
    for (std::size_t a = 0; a < s.size(); ++a) {
        if (!y[a]) continue;
        for (std::size_t b = 0; b < s.size(); ++b) {
            if (y[b]) continue;
            pairs += 1;
            if (s[a] > s[b]) wins += 1;
            else if (s[a] == s[b]) wins += 0.5;
        }
    }
    return wins / pairs;
}

/// Linear-interpolation quantile by sorting a copy.
inline double quantile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    const double h = (static_cast<double>(v.size()) - 1) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

inline std::vector<double> upper_entries(const Matrix& k) {
    std::vector<double> v;
    for (Eigen::Index j = 0; j < k.cols(); ++j)
        for (Eigen::Index i = 0; i < j; ++i) v.push_back(k(i, j));
    return v;
}

struct GridResult {
    double q = 0;
    double auc = -1;
    std::vector<double> scores;
};

/// Exhaustive grid search: every level filters a fresh copy of the
/// diagonal-zeroed matrix, every target is scored with its own entry left out.
inline GridResult threshold_search(const Matrix& k_in, const std::vector<bool>& pos, const std::vector<bool>& neg,
                                   const std::vector<std::size_t>& targets, const std::vector<double>& grid,
                                   ScoreKind kind, std::size_t knn_k) {
    Matrix k = k_in;
    k.diagonal().setZero();
    const auto entries = upper_entries(k);
    GridResult best;
    for (const double q : grid) {
        const double theta = quantile(entries, q);
        Matrix f = k;
        for (Eigen::Index i = 0; i < f.rows(); ++i)
            for (Eigen::Index j = 0; j < f.cols(); ++j)
                if (i != j && f(i, j) < theta) f(i, j) = 0;
        std::vector<double> s;
        std::vector<bool> y;
        for (const auto i : targets) {
            std::vector<double> row(static_cast<std::size_t>(f.cols()));
            for (Eigen::Index j = 0; j < f.cols(); ++j) row[static_cast<std::size_t>(j)] = f(static_cast<Eigen::Index>(i), j);
            s.push_back(score(row, pos, neg, kind, knn_k, i));
            y.push_back(pos[i]);
        }
        const double a = auc(s, y);
        if (a > best.auc) best = {q, a, s};
    }
    return best;
}

/// Literal double leave-one-out: node i is hidden from both label sets, the
/// grid search runs on the rest, then row i alone is filtered and scored.
inline std::vector<double> double_loo(const Matrix& k_in, const std::vector<bool>& labels, const std::vector<double>& grid,
                                      ScoreKind kind, std::size_t knn_k) {
    const std::size_t n = labels.size();
    Matrix k = k_in;
    k.diagonal().setZero();
    const auto entries = upper_entries(k);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<bool> pos(n), neg(n);
        std::vector<std::size_t> targets;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            pos[j] = labels[j];
            neg[j] = !labels[j];
            targets.push_back(j);
        }
        const auto g = threshold_search(k, pos, neg, targets, grid, kind, knn_k);
        const double theta = quantile(entries, g.q);
        std::vector<double> row(n);
        for (std::size_t j = 0; j < n; ++j) {
            const double v = k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            row[j] = (j == i || v < theta) ? 0.0 : v;
        }
        out[i] = score(row, pos, neg, kind, knn_k);
    }
    return out;
}

inline std::vector<bool> complement(const std::vector<bool>& v) {
    std::vector<bool> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = !v[i];
    return out;
}

}  // namespace pnet::oracle
