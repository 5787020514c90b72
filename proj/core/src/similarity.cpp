#include "pnet/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>

#include "pnet/io.hpp"

namespace pnet {

Correlation correlation_from_string(const std::string& name) {
    if (name == "pearson") return Correlation::pearson;
    if (name == "spearman") return Correlation::spearman;
    if (name == "kendall") return Correlation::kendall;
    throw ArgumentError("unknown correlation '" + name + "' (pearson, spearman, kendall)");
}

std::string to_string(Correlation c) {
    switch (c) {
        case Correlation::pearson: return "pearson";
        case Correlation::spearman: return "spearman";
        case Correlation::kendall: return "kendall";
    }
    return "?";
}

namespace {

void require_features(const ExpressionMatrix& m) {
    if (m.features() < 2) {
        throw DataError("correlation needs at least 2 features");
    }
}

// Mirror the upper triangle, pin the diagonal and clamp to [-1, 1].
void finish(Matrix& w) {
    const Eigen::Index n = w.rows();
    for (Eigen::Index j = 0; j < n; ++j) {
        w(j, j) = 1.0;
        for (Eigen::Index i = 0; i < j; ++i) {
            const double v = std::clamp(w(i, j), -1.0, 1.0);
            w(i, j) = v;
            w(j, i) = v;
        }
    }
}

}  // namespace

SimilarityMatrix pearson_matrix(const ExpressionMatrix& m) {
    require_features(m);
    const Eigen::Index n = m.values.cols();
    Matrix z = m.values;
    for (Eigen::Index j = 0; j < n; ++j) {
        auto col = z.col(j);
        col.array() -= col.mean();
        const double norm = col.norm();
        if (norm == 0.0) {
            throw DataError("sample '" + m.sample_ids[static_cast<std::size_t>(j)] +
                            "' has a constant profile; correlation undefined");
        }
        col /= norm;
    }
    SimilarityMatrix w{m.sample_ids, Matrix::Zero(n, n)};
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < j; ++i) {
            w.values(i, j) = z.col(i).dot(z.col(j));
        }
    }
    finish(w.values);
    return w;
}

std::vector<double> average_ranks(std::span<const double> values) {
    const std::size_t len = values.size();
    std::vector<std::size_t> order(len);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(len);
    std::size_t i = 0;
    while (i < len) {
        std::size_t j = i + 1;
        while (j < len && values[order[j]] == values[order[i]]) ++j;
        const double rank = 0.5 * static_cast<double>(i + 1 + j);  // mean of i+1 .. j
        for (std::size_t k = i; k < j; ++k) ranks[order[k]] = rank;
        i = j;
    }
    return ranks;
}

ExpressionMatrix rank_transform(const ExpressionMatrix& m) {
    ExpressionMatrix out = m;
    for (Eigen::Index j = 0; j < m.values.cols(); ++j) {
        const Vector col = m.values.col(j);
        const auto ranks = average_ranks(std::span<const double>(col.data(), static_cast<std::size_t>(col.size())));
        for (Eigen::Index i = 0; i < col.size(); ++i) {
            out.values(i, j) = ranks[static_cast<std::size_t>(i)];
        }
    }
    return out;
}

SimilarityMatrix spearman_matrix(const ExpressionMatrix& m) {
    return pearson_matrix(rank_transform(m));
}

namespace {

// Number of strict inversions in `y`, sorting it in place (merge sort).
std::uint64_t count_inversions(std::vector<double>& y, std::vector<double>& buf, std::size_t lo,
                               std::size_t hi) {
    if (hi - lo < 2) return 0;
    const std::size_t mid = lo + (hi - lo) / 2;
    std::uint64_t inv = count_inversions(y, buf, lo, mid) + count_inversions(y, buf, mid, hi);
    std::size_t i = lo, j = mid, k = lo;
    while (i < mid && j < hi) {
        if (y[j] < y[i]) {
            inv += mid - i;
            buf[k++] = y[j++];
        } else {
            buf[k++] = y[i++];
        }
    }
    while (i < mid) buf[k++] = y[i++];
    while (j < hi) buf[k++] = y[j++];
    std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo), buf.begin() + static_cast<std::ptrdiff_t>(hi),
              y.begin() + static_cast<std::ptrdiff_t>(lo));
    return inv;
}

// Pairs tied within runs of equal values of a sorted sequence.
template <typename Eq>
std::uint64_t tied_pairs(std::size_t len, Eq equal) {
    std::uint64_t ties = 0;
    std::size_t i = 0;
    while (i < len) {
        std::size_t j = i + 1;
        while (j < len && equal(i, j)) ++j;
        const std::uint64_t t = j - i;
        ties += t * (t - 1) / 2;
        i = j;
    }
    return ties;
}

}  // namespace

double kendall_tau_b(std::span<const double> x, std::span<const double> y) {
    const std::size_t len = x.size();
    if (y.size() != len || len < 2) {
        throw ArgumentError("kendall_tau_b needs two vectors of equal length >= 2");
    }
    std::vector<std::size_t> order(len);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (x[a] != x[b]) return x[a] < x[b];
        return y[a] < y[b];
    });
    std::vector<double> xs(len), ys(len);
    for (std::size_t i = 0; i < len; ++i) {
        xs[i] = x[order[i]];
        ys[i] = y[order[i]];
    }
    const std::uint64_t x_ties = tied_pairs(len, [&](std::size_t a, std::size_t b) { return xs[a] == xs[b]; });
    const std::uint64_t joint_ties = tied_pairs(
        len, [&](std::size_t a, std::size_t b) { return xs[a] == xs[b] && ys[a] == ys[b]; });
    // Within x-ties y is ascending, so every inversion is a discordant pair.
    std::vector<double> buf(len);
    const std::uint64_t discordant = count_inversions(ys, buf, 0, len);
    const std::uint64_t y_ties = tied_pairs(len, [&](std::size_t a, std::size_t b) { return ys[a] == ys[b]; });

    const std::uint64_t total = static_cast<std::uint64_t>(len) * (len - 1) / 2;
    if (x_ties == total || y_ties == total) {
        throw DataError("Kendall tau undefined for a constant vector");
    }
    // concordant - discordant = total - x_ties - y_ties + joint_ties - 2 * discordant
    const double numerator = static_cast<double>(total + joint_ties) -
                             static_cast<double>(x_ties + y_ties + 2 * discordant);
    const double denominator = std::sqrt(static_cast<double>(total - x_ties) *
                                         static_cast<double>(total - y_ties));
    return numerator / denominator;
}

SimilarityMatrix kendall_matrix(const ExpressionMatrix& m) {
    require_features(m);
    const Eigen::Index n = m.values.cols();
    const auto len = static_cast<std::size_t>(m.values.rows());
    for (Eigen::Index j = 0; j < n; ++j) {
        const auto col = m.values.col(j);
        if ((col.array() == col(0)).all()) {
            throw DataError("sample '" + m.sample_ids[static_cast<std::size_t>(j)] +
                            "' has a constant profile; Kendall tau undefined");
        }
    }
    SimilarityMatrix w{m.sample_ids, Matrix::Zero(n, n)};
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < j; ++i) {
            w.values(i, j) = kendall_tau_b(std::span<const double>(m.values.col(i).data(), len),
                                           std::span<const double>(m.values.col(j).data(), len));
        }
    }
    finish(w.values);
    return w;
}

SimilarityMatrix similarity_matrix(const ExpressionMatrix& m, Correlation kind) {
    switch (kind) {
        case Correlation::pearson: return pearson_matrix(m);
        case Correlation::spearman: return spearman_matrix(m);
        case Correlation::kendall: return kendall_matrix(m);
    }
    throw ArgumentError("unknown correlation kind");
}

void save_square_matrix(const std::vector<std::string>& ids, const Matrix& values,
                        const std::filesystem::path& path, const std::string& comment) {
    std::string out;
    if (!comment.empty()) {
        out += "# " + comment + '\n';
    }
    out += "sample_id";
    for (const auto& id : ids) {
        out += '\t' + id;
    }
    out += '\n';
    for (std::size_t i = 0; i < ids.size(); ++i) {
        out += ids[i];
        for (std::size_t j = 0; j < ids.size(); ++j) {
            out += '\t';
            out += io::format_double(values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
        }
        out += '\n';
    }
    io::write_text_atomic(path, out);
}

LabelledMatrix load_square_matrix(const std::filesystem::path& path) {
    LabelledMatrix out;
    {
        std::ifstream in(path);
        std::string line;
        while (std::getline(in, line) && !line.empty() && line.front() == '#') {
            auto text = line.substr(1);
            if (!text.empty() && text.front() == ' ') text.erase(0, 1);
            if (!text.empty() && text.back() == '\r') text.pop_back();
            out.comments.push_back(text);
        }
    }
    const auto m = load_expression(path, TableFormat::tsv);
    if (m.feature_ids != m.sample_ids) {
        throw DataError(path.string() + ": row ids must match the column ids of a square matrix");
    }
    out.ids = m.sample_ids;
    out.values = m.values;
    return out;
}

void save_similarity(const SimilarityMatrix& w, const std::filesystem::path& path) {
    save_square_matrix(w.sample_ids, w.values, path);
}

SimilarityMatrix load_similarity(const std::filesystem::path& path) {
    auto lm = load_square_matrix(path);
    const Matrix& v = lm.values;
    if (v != v.transpose()) {
        throw DataError(path.string() + ": similarity matrix is not symmetric");
    }
    return {std::move(lm.ids), std::move(lm.values)};
}

}  // namespace pnet
