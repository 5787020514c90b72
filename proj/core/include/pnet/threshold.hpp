#pragma once

#include <span>
#include <string>
#include <vector>

#include "pnet/scoring.hpp"

namespace pnet {

/// Strictly increasing quantile levels in [0, 1].
struct QuantileGrid {
    std::vector<double> levels;

    /// {0, 0.1, ..., 0.9, 0.95, 0.99}
    static QuantileGrid standard();
    static QuantileGrid parse(const std::string& comma_separated);

    void validate() const;
    std::string describe() const;
};

/// Linear-interpolation quantile (Hyndman-Fan type 7) of sorted data.
double quantile_sorted(std::span<const double> sorted, double q);

/// Strict upper-triangle entries of K, ascending.
std::vector<double> sorted_off_diagonal(const Matrix& k);

/// Quantile of the off-diagonal upper-triangle entries of K. Needs n >= 2.
double matrix_quantile(const KernelMatrix& k, double q);

/// Off-diagonal entries below `theta` set to 0; diagonal untouched.
KernelMatrix filter_matrix(const KernelMatrix& k, double theta);

/// Only row i and column i are filtered.
KernelMatrix filter_row(const KernelMatrix& k, std::size_t i, double theta);

/// Mann-Whitney AUC: fraction of (positive, negative) pairs ordered
/// correctly, ties counted as 1/2.
double auc(std::span<const double> scores, const std::vector<bool>& labels);

struct ThresholdResult {
    double best_quantile = 0.0;
    double best_auc = 0.0;
    /// Edge weight matching best_quantile on the diagonal-zeroed matrix.
    double best_threshold = 0.0;
    /// Scores of the target nodes at the chosen quantile (diagonal zeroed).
    ScoreVector target_scores;
    /// AUC of every grid level, in grid order.
    std::vector<double> grid_auc;
};

/// Internal leave-one-out choice of the edge-pruning quantile. The diagonal
/// of K is zeroed once, so scoring a target never uses its own label. Every
/// grid level filters the pristine matrix; the first level reaching the
/// maximal AUC wins. `targets` must hold both classes, and every target must
/// be in `positives` or `negatives`.
ThresholdResult optimize_thresh_by_loo(const KernelMatrix& k, const NodeSet& positives,
                                       const NodeSet& negatives, const NodeSet& targets,
                                       const QuantileGrid& grid, const ScoreSpec& spec);

/// Negatives = complement of positives.
ThresholdResult optimize_thresh_by_loo(const KernelMatrix& k, const NodeSet& positives,
                                       const NodeSet& targets, const QuantileGrid& grid,
                                       const ScoreSpec& spec);

}  // namespace pnet
