#include "pnet/featsel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "pnet/io.hpp"
#include "pnet/special.hpp"

namespace pnet {

namespace {

struct GroupMoments {
    double mean = 0.0;
    double var = 0.0;  // sample variance, denominator n - 1
    double n = 0.0;
};

struct Groups {
    std::vector<Eigen::Index> pos;
    std::vector<Eigen::Index> neg;
};

Groups split_groups(const ExpressionMatrix& m, const PhenotypeLabels& y) {
    if (y.sample_ids != m.sample_ids) {
        throw DataError("labels are not aligned with the expression matrix samples");
    }
    Groups g;
    for (std::size_t s = 0; s < y.size(); ++s) {
        (y.labels[s] ? g.pos : g.neg).push_back(static_cast<Eigen::Index>(s));
    }
    if (g.pos.size() < 2 || g.neg.size() < 2) {
        throw DataError("each class needs at least 2 samples (have " +
                        std::to_string(g.pos.size()) + " positive, " +
                        std::to_string(g.neg.size()) + " negative)");
    }
    return g;
}

GroupMoments moments(const Matrix& values, Eigen::Index row, const std::vector<Eigen::Index>& cols) {
    GroupMoments g;
    g.n = static_cast<double>(cols.size());
    double sum = 0.0;
    for (const auto c : cols) sum += values(row, c);
    g.mean = sum / g.n;
    double ss = 0.0;
    for (const auto c : cols) {
        const double d = values(row, c) - g.mean;
        ss += d * d;
    }
    g.var = ss / (g.n - 1.0);
    return g;
}

}  // namespace

FeatureStats welch_t(const ExpressionMatrix& m, const PhenotypeLabels& y) {
    const auto groups = split_groups(m, y);
    FeatureStats out;
    out.records.reserve(m.features());
    for (std::size_t f = 0; f < m.features(); ++f) {
        const auto row = static_cast<Eigen::Index>(f);
        const auto g1 = moments(m.values, row, groups.pos);
        const auto g2 = moments(m.values, row, groups.neg);
        const double a = g1.var / g1.n;
        const double b = g2.var / g2.n;
        FeatureStat rec;
        rec.feature_id = m.feature_ids[f];
        if (a + b == 0.0) {
            rec.t = 0.0;
            rec.df = g1.n + g2.n - 2.0;
            rec.p = 1.0;
            rec.degenerate = true;
        } else {
            rec.t = (g1.mean - g2.mean) / std::sqrt(a + b);
            rec.df = (a + b) * (a + b) / (a * a / (g1.n - 1.0) + b * b / (g2.n - 1.0));
            rec.p = special::t_two_sided_p(rec.t, rec.df);
        }
        out.records.push_back(std::move(rec));
    }
    return out;
}

FeatureStats moderated_t(const ExpressionMatrix& m, const PhenotypeLabels& y,
                         ModeratedOptions options) {
    const auto groups = split_groups(m, y);
    const std::size_t nf = m.features();
    if (nf < 3) {
        throw DataError("moderated t needs at least 3 features to estimate the prior");
    }
    const double n1 = static_cast<double>(groups.pos.size());
    const double n2 = static_cast<double>(groups.neg.size());
    const double d = n1 + n2 - 2.0;
    const double unscaled_se = std::sqrt(1.0 / n1 + 1.0 / n2);

    std::vector<double> diff(nf);
    std::vector<double> s2(nf);
    for (std::size_t f = 0; f < nf; ++f) {
        const auto row = static_cast<Eigen::Index>(f);
        const auto g1 = moments(m.values, row, groups.pos);
        const auto g2 = moments(m.values, row, groups.neg);
        diff[f] = g1.mean - g2.mean;
        s2[f] = ((n1 - 1.0) * g1.var + (n2 - 1.0) * g2.var) / d;
    }

    FeatureStats out;
    double d0 = 0.0;
    double s0_sq = 0.0;
    if (options.shrink) {
        // Zero variances would send log s^2 to -inf; floor them relative to
        // the median as limma's fitFDist does.
        std::vector<double> sorted = s2;
        std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(nf / 2), sorted.end());
        double median = sorted[nf / 2];
        if (nf % 2 == 0) {
            const double lower = *std::max_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(nf / 2));
            median = 0.5 * (median + lower);
        }
        if (median == 0.0) {
            if (*std::max_element(s2.begin(), s2.end()) == 0.0) {
                throw DataError("every feature has zero within-class variance");
            }
            median = 1.0;
        }
        const double floor_value = 1e-5 * median;

        std::vector<double> e(nf);
        const double shift = -special::digamma(d / 2.0) + std::log(d / 2.0);
        for (std::size_t f = 0; f < nf; ++f) {
            e[f] = std::log(std::max(s2[f], floor_value)) + shift;
        }
        const double emean = std::accumulate(e.begin(), e.end(), 0.0) / static_cast<double>(nf);
        double evar = 0.0;
        for (const double v : e) evar += (v - emean) * (v - emean);
        evar = evar / static_cast<double>(nf - 1) - special::trigamma(d / 2.0);
        if (evar > 0.0) {
            d0 = 2.0 * special::trigamma_inverse(evar);
            s0_sq = std::exp(emean + special::digamma(d0 / 2.0) - std::log(d0 / 2.0));
        } else {
            d0 = std::numeric_limits<double>::infinity();
            s0_sq = std::exp(emean);
        }
    }
    out.prior_df = d0;
    out.prior_variance = s0_sq;

    out.records.reserve(nf);
    for (std::size_t f = 0; f < nf; ++f) {
        double post = s2[f];
        if (std::isinf(d0)) {
            post = s0_sq;
        } else if (d0 > 0.0) {
            post = (d0 * s0_sq + d * s2[f]) / (d0 + d);
        }
        FeatureStat rec;
        rec.feature_id = m.feature_ids[f];
        rec.df = d0 + d;
        if (post == 0.0) {
            rec.t = 0.0;
            rec.p = 1.0;
            rec.degenerate = true;
        } else {
            rec.t = diff[f] / (std::sqrt(post) * unscaled_se);
            rec.p = special::t_two_sided_p(rec.t, rec.df);
        }
        out.records.push_back(std::move(rec));
    }
    return out;
}

std::vector<std::string> select_top_k(const FeatureStats& stats, std::size_t k) {
    if (k > stats.size()) {
        throw ArgumentError("top-k " + std::to_string(k) + " exceeds the feature count " +
                            std::to_string(stats.size()));
    }
    std::vector<std::size_t> order(stats.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto& r = stats.records;
    auto before = [&r](std::size_t a, std::size_t b) {
        if (r[a].p != r[b].p) return r[a].p < r[b].p;
        return r[a].feature_id < r[b].feature_id;
    };
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                      [&](std::size_t a, std::size_t b) {
                          if (before(a, b)) return true;
                          if (before(b, a)) return false;
                          return a < b;
                      });
    std::vector<std::string> ids;
    ids.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        ids.push_back(r[order[i]].feature_id);
    }
    return ids;
}

std::vector<std::string> rank_features(const FeatureStats& stats) {
    return select_top_k(stats, stats.size());
}

void save_feature_stats(const FeatureStats& stats, const std::filesystem::path& path) {
    std::string out = "feature_id\tt\tdf\tp\n";
    for (const auto& r : stats.records) {
        out += r.feature_id + '\t' + io::format_double(r.t) + '\t' + io::format_double(r.df) +
               '\t' + io::format_double(r.p) + '\n';
    }
    io::write_text_atomic(path, out);
}

}  // namespace pnet
