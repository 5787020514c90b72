#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "pnet/dataset.hpp"

namespace pnet {

struct FeatureStat {
    std::string feature_id;
    double t = 0.0;
    double df = 0.0;
    double p = 1.0;
    /// Zero variance in both classes; reported with t = 0, p = 1.
    bool degenerate = false;
};

struct FeatureStats {
    std::vector<FeatureStat> records;

    /// Moderated-t prior: residual degrees of freedom (+inf when the
    /// observed spread of log-variances is fully explained by sampling).
    double prior_df = 0.0;
    double prior_variance = 0.0;

    std::size_t size() const { return records.size(); }
};

/// Welch's unequal-variance t-test per feature, positives as group 1.
/// Requires at least 2 samples per class.
FeatureStats welch_t(const ExpressionMatrix& m, const PhenotypeLabels& y);

struct ModeratedOptions {
    /// When false the prior degrees of freedom are forced to 0 and the
    /// statistic is the ordinary pooled-variance t.
    bool shrink = true;
};

/// Empirical-Bayes moderated t. Hyperparameters come from matching the mean
/// and variance of log s^2 across features to those of a scaled F
/// distribution. Needs at least 3 features.
FeatureStats moderated_t(const ExpressionMatrix& m, const PhenotypeLabels& y,
                         ModeratedOptions options = {});

/// Top k ids by ascending p; ties by ascending id, then input order.
std::vector<std::string> select_top_k(const FeatureStats& stats, std::size_t k);

/// Full ranking (select_top_k with k = size()).
std::vector<std::string> rank_features(const FeatureStats& stats);

/// TSV with columns feature_id, t, df, p.
void save_feature_stats(const FeatureStats& stats, const std::filesystem::path& path);

}  // namespace pnet
