#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "pnet/similarity.hpp"

namespace pnet {

enum class KernelKind {
    identity,
    linear,
    gaussian,
    laplacian,
    cauchy,
    inverse_multiquadric,
    polynomial,
    random_walk,
};

/// How negative correlations enter the random-walk degree matrix.
enum class Nonnegativity {
    clip,    // w -> max(w, 0)
    affine,  // w -> (w + 1) / 2
};

KernelKind kernel_kind_from_string(const std::string& name);
std::string to_string(KernelKind kind);
Nonnegativity nonnegativity_from_string(const std::string& name);
std::string to_string(Nonnegativity n);

struct KernelSpec {
    KernelKind kind = KernelKind::random_walk;
    double sigma = 1.0;  // gaussian, laplacian, cauchy
    double c = 0.0;      // linear, polynomial, inverse multiquadric
    int degree = 2;      // polynomial
    double alpha = 1.0;  // polynomial slope
    int steps = 1;       // random walk p
    double a = 2.0;      // random walk laziness
    Nonnegativity nonnegativity = Nonnegativity::clip;

    void validate() const;
    /// e.g. "random_walk p=8 a=2 nonneg=clip"
    std::string describe() const;
};

struct KernelMatrix {
    std::vector<std::string> sample_ids;
    Matrix values;
    std::string provenance;

    std::size_t size() const { return sample_ids.size(); }
};

/// S = D^{-1/2} W+ D^{-1/2}, W+ the nonnegative transform of W and
/// D_ii = sum_j W+_ij. Isolated nodes get a zero row/column and a warning.
/// Exactly symmetric.
Matrix normalized_adjacency(const SimilarityMatrix& w, Nonnegativity nonneg,
                            Diagnostics* diag = nullptr);

/// K = ((a - 1) I + S)^p by repeated multiplication, then symmetrized.
KernelMatrix random_walk_kernel(const SimilarityMatrix& w, int p, double a,
                                Nonnegativity nonneg = Nonnegativity::clip,
                                Diagnostics* diag = nullptr);

/// k_ij = kappa(w_i, w_j) on the rows of W. Not for identity/random_walk.
KernelMatrix pointwise_kernel(const SimilarityMatrix& w, const KernelSpec& spec);

KernelMatrix identity_kernel(const SimilarityMatrix& w);

KernelMatrix make_kernel(const SimilarityMatrix& w, const KernelSpec& spec,
                         Diagnostics* diag = nullptr);

struct ConvergencePoint {
    int p = 0;
    double correlation = 0.0;
};

struct ConvergenceResult {
    /// Largest p; its kernel is the reference every other kernel is compared to.
    int reference_p = 0;
    /// Correlation between the kernels of the two largest p values.
    double reference_agreement = 0.0;
    std::vector<ConvergencePoint> points;  // in input order
};

/// Pearson correlation between the off-diagonal upper triangle of K(p) and
/// that of K(p_max), for every p in `p_list`.
ConvergenceResult kernel_convergence(const SimilarityMatrix& w, const std::vector<int>& p_list,
                                     double a, Nonnegativity nonneg = Nonnegativity::clip);

/// Pearson correlation of the strict upper triangles of two equal-size matrices.
double upper_triangle_correlation(const Matrix& x, const Matrix& y);

/// Copies the upper triangle over the lower one after averaging the pair.
void symmetrize(Matrix& m);

/// TSV with a leading "# kernel ..." provenance comment.
void save_kernel(const KernelMatrix& k, const std::filesystem::path& path);
/// Accepts kernel or similarity TSVs; provenance comes from the comment line.
KernelMatrix load_kernel(const std::filesystem::path& path);

}  // namespace pnet
