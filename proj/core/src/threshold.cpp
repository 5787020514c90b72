#include "pnet/threshold.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "pnet/io.hpp"

namespace pnet {

QuantileGrid QuantileGrid::standard() {
    return {{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99}};
}

QuantileGrid QuantileGrid::parse(const std::string& text) {
    QuantileGrid g;
    for (const auto& field : io::split(text, ',')) {
        g.levels.push_back(io::parse_double(field, "quantile grid"));
    }
    g.validate();
    return g;
}

void QuantileGrid::validate() const {
    if (levels.empty()) {
        throw ArgumentError("quantile grid is empty");
    }
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (!(levels[i] >= 0.0 && levels[i] <= 1.0)) {
            throw ArgumentError("quantile level " + io::format_double(levels[i]) + " outside [0, 1]");
        }
        if (i > 0 && !(levels[i] > levels[i - 1])) {
            throw ArgumentError("quantile grid must be strictly increasing");
        }
    }
}

std::string QuantileGrid::describe() const {
    std::string out;
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (i) out += ',';
        out += io::format_double(levels[i]);
    }
    return out;
}

double quantile_sorted(std::span<const double> sorted, double q) {
    if (sorted.empty()) {
        throw ArgumentError("quantile of an empty sample");
    }
    if (!(q >= 0.0 && q <= 1.0)) {
        throw ArgumentError("quantile level outside [0, 1]");
    }
    const double h = static_cast<double>(sorted.size() - 1) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = h - static_cast<double>(lo);
    if (frac == 0.0) {
        return sorted[lo];
    }
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

std::vector<double> sorted_off_diagonal(const Matrix& k) {
    const Eigen::Index n = k.rows();
    std::vector<double> v;
    v.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < j; ++i) {
            v.push_back(k(i, j));
        }
    }
    std::sort(v.begin(), v.end());
    return v;
}

double matrix_quantile(const KernelMatrix& k, double q) {
    if (k.values.rows() < 2) {
        throw ArgumentError("matrix_quantile needs at least 2 nodes");
    }
    const auto sorted = sorted_off_diagonal(k.values);
    return quantile_sorted(sorted, q);
}

KernelMatrix filter_matrix(const KernelMatrix& k, double theta) {
    KernelMatrix out = k;
    const Eigen::Index n = out.values.rows();
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            if (i != j && out.values(i, j) < theta) {
                out.values(i, j) = 0.0;
            }
        }
    }
    return out;
}

KernelMatrix filter_row(const KernelMatrix& k, std::size_t node, double theta) {
    KernelMatrix out = k;
    const auto i = static_cast<Eigen::Index>(node);
    if (i >= out.values.rows()) {
        throw ArgumentError("filter_row: node index out of range");
    }
    for (Eigen::Index j = 0; j < out.values.cols(); ++j) {
        if (j != i && out.values(i, j) < theta) {
            out.values(i, j) = 0.0;
            out.values(j, i) = 0.0;
        }
    }
    return out;
}

double auc(std::span<const double> scores, const std::vector<bool>& labels) {
    const std::size_t len = scores.size();
    if (labels.size() != len) {
        throw ArgumentError("auc: scores and labels differ in length");
    }
    std::vector<std::size_t> order(len);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Twice the rank-sum of the positives, with midranks for ties; kept as an
    // integer so the statistic is exact.
    std::uint64_t twice_rank_sum = 0;
    std::size_t n_pos = 0;
    std::size_t i = 0;
    while (i < len) {
        std::size_t j = i + 1;
        while (j < len && scores[order[j]] == scores[order[i]]) ++j;
        const std::uint64_t twice_rank = i + 1 + j;  // 2 * mean of ranks i+1 .. j
        for (std::size_t t = i; t < j; ++t) {
            if (labels[order[t]]) {
                twice_rank_sum += twice_rank;
                ++n_pos;
            }
        }
        i = j;
    }
    const std::size_t n_neg = len - n_pos;
    if (n_pos == 0 || n_neg == 0) {
        throw DataError("AUC needs at least one positive and one negative");
    }
    // 2U = 2R - n_pos (n_pos + 1)
    const std::uint64_t twice_u = twice_rank_sum - static_cast<std::uint64_t>(n_pos) * (n_pos + 1);
    return static_cast<double>(twice_u) / (2.0 * static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

ThresholdResult optimize_thresh_by_loo(const KernelMatrix& k, const NodeSet& positives,
                                       const NodeSet& negatives, const NodeSet& targets,
                                       const QuantileGrid& grid, const ScoreSpec& spec) {
    grid.validate();
    spec.validate();
    const auto n = static_cast<std::size_t>(k.values.rows());
    if (n < 2 || positives.universe() != n || negatives.universe() != n || targets.universe() != n) {
        throw ArgumentError("optimize_thresh_by_loo: node sets do not match the kernel size");
    }
    std::vector<bool> target_labels;
    target_labels.reserve(targets.size());
    for (const auto i : targets.members()) {
        if (positives.contains(i) == negatives.contains(i)) {
            throw ArgumentError("target node " + std::to_string(i) + " must be exactly one of positive or negative");
        }
        target_labels.push_back(positives.contains(i));
    }
    const auto target_pos = static_cast<std::size_t>(std::count(target_labels.begin(), target_labels.end(), true));
    if (target_pos == 0 || target_pos == target_labels.size()) {
        throw DataError("internal leave-one-out needs both classes among the target nodes");
    }

    Matrix zeroed = k.values;
    zeroed.diagonal().setZero();
    const auto sorted = sorted_off_diagonal(zeroed);

    ThresholdResult best;
    best.best_auc = -std::numeric_limits<double>::infinity();
    std::vector<double> row(n);
    std::vector<double> scores(targets.size());
    ScoreVector level_scores;
    for (const double q : grid.levels) {
        const double theta = quantile_sorted(sorted, q);
        std::size_t zero_denominators = 0;
        for (std::size_t t = 0; t < targets.size(); ++t) {
            const auto i = targets.members()[t];
            const auto col = zeroed.col(static_cast<Eigen::Index>(i));
            for (std::size_t j = 0; j < n; ++j) {
                const double v = col(static_cast<Eigen::Index>(j));
                row[j] = v < theta ? 0.0 : v;
            }
            row[i] = 0.0;
            const auto s = score_node(row, positives, negatives, spec);
            scores[t] = s.value;
            zero_denominators += s.zero_denominator ? 1 : 0;
        }
        const double a = auc(scores, target_labels);
        best.grid_auc.push_back(a);
        if (a > best.best_auc) {
            best.best_auc = a;
            best.best_quantile = q;
            best.best_threshold = theta;
            level_scores.scores = scores;
            level_scores.zero_denominators = zero_denominators;
        }
    }
    for (const auto i : targets.members()) {
        level_scores.sample_ids.push_back(k.sample_ids[i]);
    }
    best.target_scores = std::move(level_scores);
    return best;
}

ThresholdResult optimize_thresh_by_loo(const KernelMatrix& k, const NodeSet& positives,
                                       const NodeSet& targets, const QuantileGrid& grid,
                                       const ScoreSpec& spec) {
    return optimize_thresh_by_loo(k, positives, positives.complement(), targets, grid, spec);
}

}  // namespace pnet
