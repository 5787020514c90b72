#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pnet/error.hpp"

namespace pnet {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// m features x n samples of log2 expression values.
struct ExpressionMatrix {
    std::vector<std::string> feature_ids;
    std::vector<std::string> sample_ids;
    Matrix values;

    std::size_t features() const { return feature_ids.size(); }
    std::size_t samples() const { return sample_ids.size(); }

    /// Throws DataError if dimensions, id uniqueness or finiteness are violated.
    void validate() const;

    /// Rows in `rows` (in that order), all samples.
    ExpressionMatrix select_rows(std::span<const std::size_t> rows) const;
    /// All features, columns in `columns` (in that order).
    ExpressionMatrix select_columns(std::span<const std::size_t> columns) const;
};

/// Binary phenotype per sample; true marks the phenotype of interest
/// (e.g. poor prognosis).
struct PhenotypeLabels {
    std::vector<std::string> sample_ids;
    std::vector<bool> labels;

    std::size_t size() const { return labels.size(); }
    std::size_t positives() const;
    std::size_t negatives() const { return size() - positives(); }
    bool has_both_classes() const { return positives() > 0 && negatives() > 0; }

    /// Labels reordered to `sample_ids`; throws DataError on a missing id.
    PhenotypeLabels aligned_to(const std::vector<std::string>& sample_ids) const;
};

/// probe id -> gene id; gene ids may repeat.
struct ProbeGeneMap {
    std::vector<std::pair<std::string, std::string>> entries;

    std::unordered_map<std::string, std::string> lookup() const;
};

enum class TableFormat { tsv, csv };

TableFormat table_format_from_path(const std::filesystem::path& path);

/// First row holds sample ids (optionally preceded by a corner label), first
/// column feature ids. Missing or non-numeric cells are rejected with their
/// line and column.
ExpressionMatrix load_expression(const std::filesystem::path& path, TableFormat format);
void save_expression(const ExpressionMatrix& m, const std::filesystem::path& path,
                     TableFormat format = TableFormat::tsv);

/// Two-column file: sample id, label in {0,1}. An optional header line whose
/// second field is not a label is skipped.
PhenotypeLabels load_labels(const std::filesystem::path& path);
void save_labels(const PhenotypeLabels& labels, const std::filesystem::path& path);

/// Two-column file: sample id, survival time.
std::pair<std::vector<std::string>, std::vector<double>> load_survival(
    const std::filesystem::path& path);

ProbeGeneMap load_probe_map(const std::filesystem::path& path);

/// One id per line.
std::unordered_set<std::string> load_id_list(const std::filesystem::path& path);

// Pre-filtering. Every filter keeps the sample columns and the relative order
// of retained rows; an empty result is a DataError.

ExpressionMatrix filter_by_mean(const ExpressionMatrix& m, double min_mean);

/// Sample standard deviation (denominator n - 1).
ExpressionMatrix filter_by_sd(const ExpressionMatrix& m, double min_sd);

struct CollapseResult {
    ExpressionMatrix matrix;
    std::size_t unmapped_probes = 0;
};

/// Keeps, per gene, the probe with the highest mean (earliest probe on ties);
/// rows are renamed to gene ids and ordered by first occurrence of the gene.
CollapseResult collapse_probes(const ExpressionMatrix& m, const ProbeGeneMap& map);

ExpressionMatrix filter_by_gene_list(const ExpressionMatrix& m,
                                     const std::unordered_set<std::string>& ids);

/// positive iff survival < cutoff (strict). Warns when only one class results.
PhenotypeLabels derive_labels(const std::vector<std::string>& sample_ids,
                              std::span<const double> survival, double cutoff,
                              Diagnostics* diag = nullptr);

struct Cohort {
    ExpressionMatrix matrix;
    PhenotypeLabels labels;
};

/// Two Gaussian classes; positives are shifted by `effect_size` feature
/// standard deviations on the first `n_informative` features. Features get
/// heterogeneous baseline means so sample profiles correlate strongly, as
/// microarray profiles do.
Cohort synth_cohort(std::size_t n_samples, std::size_t n_features, std::size_t n_informative,
                    double effect_size, std::uint64_t seed);

std::vector<double> row_means(const ExpressionMatrix& m);
std::vector<double> row_sds(const ExpressionMatrix& m);

}  // namespace pnet
