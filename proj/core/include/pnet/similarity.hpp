#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "pnet/dataset.hpp"

namespace pnet {

/// n x n sample-sample correlation matrix. Exactly symmetric, unit diagonal.
struct SimilarityMatrix {
    std::vector<std::string> sample_ids;
    Matrix values;

    std::size_t size() const { return sample_ids.size(); }
};

enum class Correlation { pearson, spearman, kendall };

Correlation correlation_from_string(const std::string& name);
std::string to_string(Correlation c);

SimilarityMatrix pearson_matrix(const ExpressionMatrix& m);
SimilarityMatrix spearman_matrix(const ExpressionMatrix& m);
/// Kendall tau-b (tie-adjusted), O(m log m) per pair.
SimilarityMatrix kendall_matrix(const ExpressionMatrix& m);

SimilarityMatrix similarity_matrix(const ExpressionMatrix& m, Correlation kind);

/// Column-wise average ranks (1-based; ties share the mean of their ranks).
ExpressionMatrix rank_transform(const ExpressionMatrix& m);

std::vector<double> average_ranks(std::span<const double> values);

/// Kendall tau-b of two equally long vectors; throws if either is constant.
double kendall_tau_b(std::span<const double> x, std::span<const double> y);

/// Square labelled matrix in TSV: header of ids (with corner cell), one row
/// per id. Values are written with 17 significant digits.
void save_square_matrix(const std::vector<std::string>& ids, const Matrix& values,
                        const std::filesystem::path& path, const std::string& comment = {});

struct LabelledMatrix {
    std::vector<std::string> ids;
    Matrix values;
    /// Text of leading '#' lines, without the marker.
    std::vector<std::string> comments;
};

LabelledMatrix load_square_matrix(const std::filesystem::path& path);

void save_similarity(const SimilarityMatrix& w, const std::filesystem::path& path);
SimilarityMatrix load_similarity(const std::filesystem::path& path);

}  // namespace pnet
