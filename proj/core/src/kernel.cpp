#include "pnet/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pnet/io.hpp"

namespace pnet {

KernelKind kernel_kind_from_string(const std::string& name) {
    if (name == "identity") return KernelKind::identity;
    if (name == "linear") return KernelKind::linear;
    if (name == "gaussian") return KernelKind::gaussian;
    if (name == "laplacian") return KernelKind::laplacian;
    if (name == "cauchy") return KernelKind::cauchy;
    if (name == "inverse_multiquadric" || name == "invmq") return KernelKind::inverse_multiquadric;
    if (name == "polynomial") return KernelKind::polynomial;
    if (name == "random_walk" || name == "rwk") return KernelKind::random_walk;
    throw ArgumentError("unknown kernel '" + name +
                        "' (identity, linear, gaussian, laplacian, cauchy, invmq, polynomial, rwk)");
}

std::string to_string(KernelKind kind) {
    switch (kind) {
        case KernelKind::identity: return "identity";
        case KernelKind::linear: return "linear";
        case KernelKind::gaussian: return "gaussian";
        case KernelKind::laplacian: return "laplacian";
        case KernelKind::cauchy: return "cauchy";
        case KernelKind::inverse_multiquadric: return "inverse_multiquadric";
        case KernelKind::polynomial: return "polynomial";
        case KernelKind::random_walk: return "random_walk";
    }
    return "?";
}

Nonnegativity nonnegativity_from_string(const std::string& name) {
    if (name == "clip") return Nonnegativity::clip;
    if (name == "affine") return Nonnegativity::affine;
    throw ArgumentError("unknown nonnegativity transform '" + name + "' (clip, affine)");
}

std::string to_string(Nonnegativity n) {
    return n == Nonnegativity::clip ? "clip" : "affine";
}

void KernelSpec::validate() const {
    switch (kind) {
        case KernelKind::gaussian:
        case KernelKind::laplacian:
        case KernelKind::cauchy:
            if (!(sigma > 0.0) || !std::isfinite(sigma)) {
                throw ArgumentError(to_string(kind) + " kernel needs sigma > 0");
            }
            break;
        case KernelKind::inverse_multiquadric:
            if (c == 0.0 || !std::isfinite(c)) {
                throw ArgumentError("inverse multiquadric kernel needs a nonzero c");
            }
            break;
        case KernelKind::polynomial:
            if (degree < 1) {
                throw ArgumentError("polynomial kernel needs degree >= 1");
            }
            if (!std::isfinite(alpha) || !std::isfinite(c)) {
                throw ArgumentError("polynomial kernel needs finite alpha and c");
            }
            break;
        case KernelKind::linear:
            if (!std::isfinite(c)) {
                throw ArgumentError("linear kernel needs a finite c");
            }
            break;
        case KernelKind::random_walk:
            if (steps < 0) {
                throw ArgumentError("random walk kernel needs p >= 0");
            }
            if (!(a > 1.0) || !std::isfinite(a)) {
                throw ArgumentError("random walk kernel needs a > 1");
            }
            break;
        case KernelKind::identity:
            break;
    }
}

std::string KernelSpec::describe() const {
    const auto f = io::format_double;
    switch (kind) {
        case KernelKind::identity: return "identity";
        case KernelKind::linear: return "linear c=" + f(c);
        case KernelKind::gaussian:
        case KernelKind::laplacian:
        case KernelKind::cauchy: return to_string(kind) + " sigma=" + f(sigma);
        case KernelKind::inverse_multiquadric: return "inverse_multiquadric c=" + f(c);
        case KernelKind::polynomial:
            return "polynomial degree=" + std::to_string(degree) + " alpha=" + f(alpha) + " c=" + f(c);
        case KernelKind::random_walk:
            return "random_walk p=" + std::to_string(steps) + " a=" + f(a) +
                   " nonneg=" + to_string(nonnegativity);
    }
    return "?";
}

void symmetrize(Matrix& m) {
    const Eigen::Index n = m.rows();
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < j; ++i) {
            const double v = 0.5 * (m(i, j) + m(j, i));
            m(i, j) = v;
            m(j, i) = v;
        }
    }
}

Matrix normalized_adjacency(const SimilarityMatrix& w, Nonnegativity nonneg, Diagnostics* diag) {
    const Eigen::Index n = w.values.rows();
    Matrix plus = w.values;
    if (nonneg == Nonnegativity::clip) {
        plus = plus.cwiseMax(0.0);
    } else {
        plus = (plus.array() + 1.0) * 0.5;
    }
    Vector inv_sqrt_degree(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double degree = plus.row(i).sum();
        if (degree > 0.0) {
            inv_sqrt_degree(i) = 1.0 / std::sqrt(degree);
        } else {
            inv_sqrt_degree(i) = 0.0;
            warn(diag, "node '" + w.sample_ids[static_cast<std::size_t>(i)] +
                           "' is isolated (zero degree); its random-walk row is zero");
        }
    }
    Matrix s(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i <= j; ++i) {
            const double v = plus(i, j) * inv_sqrt_degree(i) * inv_sqrt_degree(j);
            s(i, j) = v;
            s(j, i) = v;
        }
    }
    return s;
}

namespace {

Matrix walk_step_matrix(const SimilarityMatrix& w, double a, Nonnegativity nonneg, Diagnostics* diag) {
    Matrix b = normalized_adjacency(w, nonneg, diag);
    b.diagonal().array() += a - 1.0;
    return b;
}

}  // namespace

KernelMatrix random_walk_kernel(const SimilarityMatrix& w, int p, double a, Nonnegativity nonneg,
                                Diagnostics* diag) {
    KernelSpec spec;
    spec.kind = KernelKind::random_walk;
    spec.steps = p;
    spec.a = a;
    spec.nonnegativity = nonneg;
    spec.validate();

    const Eigen::Index n = w.values.rows();
    KernelMatrix k{w.sample_ids, Matrix::Identity(n, n), spec.describe()};
    if (p == 0) {
        return k;
    }
    const Matrix step = walk_step_matrix(w, a, nonneg, diag);
    k.values = step;
    for (int i = 1; i < p; ++i) {
        k.values = (k.values * step).eval();
    }
    symmetrize(k.values);
    return k;
}

KernelMatrix pointwise_kernel(const SimilarityMatrix& w, const KernelSpec& spec) {
    spec.validate();
    if (spec.kind == KernelKind::identity || spec.kind == KernelKind::random_walk) {
        throw ArgumentError("pointwise_kernel does not handle " + to_string(spec.kind));
    }
    const Eigen::Index n = w.values.rows();
    const Matrix& x = w.values;  // row i = profile of sample i (W is symmetric)
    KernelMatrix k{w.sample_ids, Matrix::Zero(n, n), spec.describe()};
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i <= j; ++i) {
            const double dot = x.col(i).dot(x.col(j));
            const double dist2 = (x.col(i) - x.col(j)).squaredNorm();
            double v = 0.0;
            switch (spec.kind) {
                case KernelKind::linear: v = dot + spec.c; break;
                case KernelKind::gaussian: v = std::exp(-dist2 / (2.0 * spec.sigma * spec.sigma)); break;
                case KernelKind::laplacian: v = std::exp(-std::sqrt(dist2) / spec.sigma); break;
                case KernelKind::cauchy: v = 1.0 / (1.0 + dist2 / (spec.sigma * spec.sigma)); break;
                case KernelKind::inverse_multiquadric: v = 1.0 / std::sqrt(dist2 + spec.c * spec.c); break;
                case KernelKind::polynomial: v = std::pow(spec.alpha * dot + spec.c, spec.degree); break;
                default: break;
            }
            k.values(i, j) = v;
            k.values(j, i) = v;
        }
    }
    return k;
}

KernelMatrix identity_kernel(const SimilarityMatrix& w) {
    return {w.sample_ids, w.values, "identity"};
}

KernelMatrix make_kernel(const SimilarityMatrix& w, const KernelSpec& spec, Diagnostics* diag) {
    switch (spec.kind) {
        case KernelKind::identity: return identity_kernel(w);
        case KernelKind::random_walk:
            return random_walk_kernel(w, spec.steps, spec.a, spec.nonnegativity, diag);
        default: return pointwise_kernel(w, spec);
    }
}

double upper_triangle_correlation(const Matrix& x, const Matrix& y) {
    const Eigen::Index n = x.rows();
    if (y.rows() != n || x.cols() != n || y.cols() != n || n < 3) {
        throw ArgumentError("upper_triangle_correlation needs equal square matrices with n >= 3");
    }
    std::vector<double> a, b;
    a.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
    b.reserve(a.capacity());
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < j; ++i) {
            a.push_back(x(i, j));
            b.push_back(y(i, j));
        }
    }
    const auto len = static_cast<double>(a.size());
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / len;
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / len;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    if (saa == 0.0 || sbb == 0.0) {
        return saa == sbb ? 1.0 : 0.0;
    }
    return sab / std::sqrt(saa * sbb);
}

ConvergenceResult kernel_convergence(const SimilarityMatrix& w, const std::vector<int>& p_list,
                                     double a, Nonnegativity nonneg) {
    if (p_list.size() < 2) {
        throw ArgumentError("kernel_convergence needs at least 2 values of p");
    }
    std::vector<int> sorted = p_list;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    if (sorted.size() < 2 || sorted.front() < 0) {
        throw ArgumentError("kernel_convergence needs at least 2 distinct values of p >= 0");
    }

    KernelSpec spec;
    spec.steps = 0;
    spec.a = a;
    spec.validate();

    // One pass of incremental powers; each K(p) is rescaled by its largest
    // entry so p = 50 stays far from overflow. Correlation ignores the scale.
    const Matrix step = walk_step_matrix(w, a, nonneg, nullptr);
    const Eigen::Index n = step.rows();
    std::vector<Matrix> kernels;
    Matrix current = Matrix::Identity(n, n);
    int power = 0;
    for (const int p : sorted) {
        while (power < p) {
            current = (current * step).eval();
            const double scale = current.cwiseAbs().maxCoeff();
            if (scale > 0.0) current /= scale;
            ++power;
        }
        Matrix sym = current;
        symmetrize(sym);
        kernels.push_back(std::move(sym));
    }

    ConvergenceResult out;
    out.reference_p = sorted.back();
    const Matrix& reference = kernels.back();
    out.reference_agreement = upper_triangle_correlation(kernels[kernels.size() - 2], reference);
    for (const int p : p_list) {
        const auto idx = static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), p) - sorted.begin());
        out.points.push_back({p, upper_triangle_correlation(kernels[idx], reference)});
    }
    return out;
}

void save_kernel(const KernelMatrix& k, const std::filesystem::path& path) {
    save_square_matrix(k.sample_ids, k.values, path, "kernel " + k.provenance);
}

KernelMatrix load_kernel(const std::filesystem::path& path) {
    auto lm = load_square_matrix(path);
    KernelMatrix k{std::move(lm.ids), std::move(lm.values), "similarity"};
    for (const auto& c : lm.comments) {
        if (c.rfind("kernel ", 0) == 0) {
            k.provenance = c.substr(7);
        }
    }
    if (k.values != k.values.transpose()) {
        throw DataError(path.string() + ": kernel matrix is not symmetric");
    }
    return k;
}

}  // namespace pnet
