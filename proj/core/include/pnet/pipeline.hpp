#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pnet/featsel.hpp"
#include "pnet/rng.hpp"
#include "pnet/threshold.hpp"

namespace pnet {

enum class FeatureSelection { welch, moderated, none };

FeatureSelection feature_selection_from_string(const std::string& name);
std::string to_string(FeatureSelection f);

struct PipelineConfig {
    FeatureSelection featsel = FeatureSelection::welch;
    std::size_t top_k = 1000;
    bool moderated_shrink = true;

    Correlation similarity = Correlation::pearson;
    KernelSpec kernel;
    ScoreSpec score;
    QuantileGrid edge_grid = QuantileGrid::standard();
    /// Quantile levels of the training scores tried as classification cuts.
    QuantileGrid score_grid = QuantileGrid::standard();

    std::optional<std::uint64_t> seed;
    std::size_t rounds = 100;
    std::size_t train_size = 0;  // MCCV
    std::size_t folds = 5;       // k-fold
    std::size_t threads = 1;
    std::size_t stability_top = 20;
    std::size_t max_split_attempts = 100;

    /// Checks parameter domains; harness-specific checks happen in mccv/kfold_eval.
    void validate() const;
};

// --- P-Net on a fixed kernel matrix -------------------------------------

struct DoubleLooResult {
    ScoreVector scores;              // every node, index order
    std::vector<double> quantiles;   // per-node internal-loo quantile
    std::vector<double> thresholds;  // matching edge weights
};

/// External leave-one-out around the internal one: node i is scored with its
/// own label removed from the positive/negative sets, after filtering its row
/// at the quantile chosen by internal leave-one-out on the other nodes.
/// Needs >= 2 positives and >= 2 negatives.
DoubleLooResult pnet_double_loo(const KernelMatrix& k, const NodeSet& positives,
                                const QuantileGrid& grid, const ScoreSpec& spec);

struct HeldoutResult {
    ScoreVector test_scores;   // test nodes, index order
    ScoreVector train_scores;  // internal-loo scores at the chosen quantile
    double quantile = 0.0;
    double threshold = 0.0;
    double internal_auc = 0.0;
};

/// Labels are read for training nodes only: positives outside `train` are ignored.
HeldoutResult pnet_heldout(const KernelMatrix& k, const NodeSet& positives, const NodeSet& train,
                           const NodeSet& test, const QuantileGrid& grid, const ScoreSpec& spec);

struct CvResult {
    ScoreVector scores;                 // nodes of completed folds, index order
    std::vector<std::size_t> fold_of;   // fold index per node
    std::vector<double> fold_quantiles; // NaN for aborted folds
    std::vector<std::string> fold_errors;  // empty string when the fold completed
};

/// Random k-fold split (seeded) with internal leave-one-out per fold.
/// A fold whose training part lacks a class is aborted and reported.
CvResult pnet_cv(const KernelMatrix& k, const NodeSet& positives, std::size_t folds,
                 const QuantileGrid& grid, const ScoreSpec& spec, std::uint64_t seed);

/// Fold index of every node: a seeded shuffle dealt round-robin, so fold
/// sizes differ by at most one.
std::vector<std::size_t> split_folds(std::size_t n, std::size_t folds, std::uint64_t seed,
                                     std::uint64_t stream = 0);

struct ScoreThreshold {
    double cut = 0.0;
    double quantile = 0.0;
    double accuracy = 0.0;
};

/// Tries each grid quantile of the training scores as a cut (score > cut is
/// positive) and keeps the most accurate one; ties go to the lowest cut.
ScoreThreshold select_score_threshold(std::span<const double> train_scores,
                                      const std::vector<bool>& train_labels,
                                      const QuantileGrid& grid);

// --- Evaluation harnesses ------------------------------------------------

/// Everything computed for one train/test split of an expression matrix.
struct SplitOutcome {
    std::vector<std::size_t> train;  // sample indices, ascending
    std::vector<std::size_t> test;
    /// Selected features in rank order (empty when feature selection is off).
    std::vector<std::string> selected_features;
    double edge_quantile = 0.0;
    double edge_threshold = 0.0;
    double internal_auc = 0.0;
    ScoreThreshold score_threshold;
    std::vector<double> test_scores;  // aligned with `test`
    std::vector<bool> predicted;
    std::vector<bool> truth;

    std::size_t positives_tested = 0;
    std::size_t positive_errors = 0;
    std::size_t negatives_tested = 0;
    std::size_t negative_errors = 0;
    std::vector<std::string> warnings;

    std::size_t errors() const { return positive_errors + negative_errors; }
    double error_rate() const;
    double accuracy() const { return 1.0 - error_rate(); }
};

/// One transductive P-Net pass: feature selection on the training samples,
/// similarity and kernel over all samples of `m`, edge-threshold selection by
/// internal leave-one-out on the training nodes, test scoring, and a score
/// cut chosen on training scores. Test labels are only used to count errors.
SplitOutcome run_split(const ExpressionMatrix& m, const PhenotypeLabels& y,
                       std::vector<std::size_t> train, std::vector<std::size_t> test,
                       const PipelineConfig& cfg);

struct FoldRecord {
    std::size_t fold = 0;
    std::optional<SplitOutcome> outcome;  // empty when aborted
    std::string error;
};

struct RoundRecord {
    std::size_t round = 0;
    std::size_t attempts = 1;
    std::vector<FoldRecord> folds;  // MCCV rounds have exactly one
    std::string error;              // set when the round could not be formed

    bool completed() const;
    /// Mean fold error over completed folds (the CV error of the round).
    double error_rate() const;
    double accuracy() const { return 1.0 - error_rate(); }
    /// Errors within one class over every completed fold of the round;
    /// nullopt when the class was never tested.
    std::optional<double> class_error_rate(bool positive_class) const;
};

struct EvaluationReport {
    std::string harness;  // "mccv" or "kfold"
    PipelineConfig config;
    std::vector<std::string> sample_ids;
    std::vector<bool> labels;
    std::vector<RoundRecord> rounds;

    std::size_t completed_rounds = 0;
    double mean_accuracy = 0.0;
    /// Standard error of the mean: sd(round accuracies) / sqrt(rounds).
    double sem = 0.0;
    double mean_error = 0.0;
    std::optional<double> positive_error_rate;
    std::optional<double> negative_error_rate;
    /// Fraction of rounds in which each sample, when tested, was classified
    /// correctly; nullopt for samples never tested.
    std::vector<std::optional<double>> per_patient_accuracy;
    std::vector<std::size_t> per_patient_tests;
    std::optional<double> stability;
};

/// Monte Carlo cross-validation with class-balanced test sets.
EvaluationReport mccv(const ExpressionMatrix& m, const PhenotypeLabels& y, const PipelineConfig& cfg);

/// `cfg.rounds` rounds of `cfg.folds`-fold cross-validation.
EvaluationReport kfold_eval(const ExpressionMatrix& m, const PhenotypeLabels& y,
                            const PipelineConfig& cfg);

/// Mean over unordered pairs of |top_k(a) intersect top_k(b)| / top_k.
double stability(const std::vector<std::vector<std::string>>& feature_sets, std::size_t top_k);

/// Balanced MCCV split for one attempt: test classes differ by at most one.
/// Returns {train, test}, both ascending.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> balanced_split(
    const std::vector<bool>& labels, std::size_t train_size, Rng& rng);

}  // namespace pnet
