#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/polygamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>
#include <boost/math/tools/roots.hpp>

#include "pnet/featsel.hpp"
#include "pnet/special.hpp"
#include "test_util.hpp"

using namespace pnet;

namespace {

double boost_two_sided(double t, double df) {
    boost::math::students_t dist(df);
    return 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t)));
}

ExpressionMatrix two_groups(const std::vector<double>& a, const std::vector<double>& b) {
    ExpressionMatrix m;
    m.feature_ids = {"g"};
    m.values.resize(1, static_cast<Eigen::Index>(a.size() + b.size()));
    Eigen::Index c = 0;
    for (const double v : a) m.values(0, c++) = v;
    for (const double v : b) m.values(0, c++) = v;
    m.sample_ids = fixtures::make_ids(a.size() + b.size(), "s");
    return m;
}

PhenotypeLabels group_labels(const ExpressionMatrix& m, std::size_t n_pos) {
    PhenotypeLabels y;
    y.sample_ids = m.sample_ids;
    for (std::size_t i = 0; i < m.samples(); ++i) y.labels.push_back(i < n_pos);
    return y;
}

struct Welch {
    double t, df, p;
};

// Textbook formulas, written out independently of the library.
Welch welch_oracle(const std::vector<double>& a, const std::vector<double>& b) {
    auto mean = [](const std::vector<double>& v) {
        double s = 0;
        for (double x : v) s += x;
        return s / static_cast<double>(v.size());
    };
    auto var = [&](const std::vector<double>& v) {
        const double m = mean(v);
        double s = 0;
        for (double x : v) s += (x - m) * (x - m);
        return s / static_cast<double>(v.size() - 1);
    };
    const double n1 = static_cast<double>(a.size()), n2 = static_cast<double>(b.size());
    const double q1 = var(a) / n1, q2 = var(b) / n2;
    const double t = (mean(a) - mean(b)) / std::sqrt(q1 + q2);
    const double df = (q1 + q2) * (q1 + q2) / (q1 * q1 / (n1 - 1) + q2 * q2 / (n2 - 1));
    return {t, df, boost_two_sided(t, df)};
}

}  // namespace

TEST(Special, IncompleteBetaMatchesBoost) {
    for (double a : {0.5, 1.0, 2.5, 7.0, 30.0}) {
        for (double b : {0.5, 1.5, 4.0, 12.0}) {
            for (double x : {0.01, 0.2, 0.5, 0.77, 0.99}) {
                EXPECT_NEAR(special::incomplete_beta(a, b, x), boost::math::ibeta(a, b, x), 1e-12)
                    << a << " " << b << " " << x;
            }
        }
    }
}

TEST(Special, IncompleteBetaFrozenScipy) {
    EXPECT_NEAR(special::incomplete_beta(2.5, 3.5, 0.3), 0.29675298929566646, 1e-13);
    EXPECT_NEAR(special::incomplete_beta(0.5, 0.5, 0.9), 0.7951672353008665, 1e-13);
    EXPECT_NEAR(special::incomplete_beta(10, 2, 0.95), 0.8981054088575682, 1e-13);
}

TEST(Special, TwoSidedPMatchesBoostAndScipy) {
    for (double df : {1.0, 2.2, 3.0, 7.5, 30.0, 250.0}) {
        for (double t : {0.0, 0.4, -1.2, 2.5, 4.0, 10.0, -35.0}) {
            EXPECT_NEAR(special::t_two_sided_p(t, df), boost_two_sided(t, df), 1e-10) << t << " " << df;
        }
    }
    EXPECT_NEAR(special::t_two_sided_p(2.5, 3), 0.08770664700806555, 1e-12);
    EXPECT_NEAR(special::t_two_sided_p(-1.2, 7.5), 0.266668922793222, 1e-12);
    EXPECT_NEAR(special::t_two_sided_p(10.0, 1), 0.06345103486110712, 1e-12);
    EXPECT_NEAR(special::t_two_sided_p(1.96, std::numeric_limits<double>::infinity()), std::erfc(1.96 / std::sqrt(2.0)),
                1e-15);
}

TEST(Special, PolygammaMatchesBoost) {
    for (double x : {0.05, 0.5, 1.0, 2.75, 6.0, 13.3, 400.0}) {
        EXPECT_NEAR(special::digamma(x), boost::math::digamma(x), 1e-12 * std::max(1.0, std::fabs(boost::math::digamma(x))));
        EXPECT_NEAR(special::trigamma(x), boost::math::trigamma(x), 1e-12 * boost::math::trigamma(x));
        EXPECT_NEAR(special::tetragamma(x), boost::math::polygamma(2, x), 1e-11 * std::fabs(boost::math::polygamma(2, x)));
    }
}

TEST(Special, TrigammaInverseRoundTrips) {
    for (double y : {0.01, 0.3, 1.0, 4.5, 80.0, 1e4}) {
        const double x = boost::math::trigamma(y);
        EXPECT_NEAR(special::trigamma_inverse(x), y, 1e-8 * y);
    }
}

TEST(WelchT, IdenticalGroupsGiveZero) {
    const auto m = two_groups({1, 2, 3}, {1, 2, 3});
    const auto s = welch_t(m, group_labels(m, 3));
    EXPECT_DOUBLE_EQ(s.records[0].t, 0.0);
    EXPECT_DOUBLE_EQ(s.records[0].p, 1.0);
}

TEST(WelchT, TextbookInstance) {
    const auto m = two_groups({1, 2, 3, 4}, {3, 4, 5, 6});
    const auto r = welch_t(m, group_labels(m, 4)).records[0];
    // t = -2 / sqrt(5/12 + 5/12), df = 6 (equal sizes and variances)
    EXPECT_NEAR(r.t, -2.0 / std::sqrt(10.0 / 12.0), 1e-12);
    EXPECT_NEAR(r.df, 6.0, 1e-12);
    EXPECT_NEAR(r.p, 0.07098765432098755, 1e-9);  // scipy ttest_ind(equal_var=False)
}

TEST(WelchT, FrozenScipyValues) {
    struct Case {
        std::vector<double> a, b;
        double t, p, df;
    };
    const std::vector<Case> cases = {
        {{2.5, 3.1, 4.7, 5.0, 6.2}, {1.0, 1.4, 2.2}, 3.6599051486430585, 0.011728045826495637, 5.659869143692918},
        {{10, 10.5, 9.8, 11.2}, {7.1, 8.4, 6.6, 9.9, 8.0, 7.7}, 4.3017036760855625, 0.00273406375257556, 7.8414010607429},
    };
    for (const auto& c : cases) {
        const auto m = two_groups(c.a, c.b);
        const auto r = welch_t(m, group_labels(m, c.a.size())).records[0];
        EXPECT_NEAR(r.t, c.t, 1e-9);
        EXPECT_NEAR(r.df, c.df, 1e-9);
        EXPECT_NEAR(r.p, c.p, 1e-9);
    }
}

TEST(WelchT, RandomInstancesMatchOracle) {
    std::mt19937_64 rng(41);
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_int_distribution<int> size(2, 9);
    for (int rep = 0; rep < 12; ++rep) {
        std::vector<double> a(static_cast<std::size_t>(size(rng))), b(static_cast<std::size_t>(size(rng)));
        for (auto& v : a) v = 5.0 + g(rng);
        for (auto& v : b) v = 5.5 + 2.0 * g(rng);
        const auto m = two_groups(a, b);
        const auto r = welch_t(m, group_labels(m, a.size())).records[0];
        const auto o = welch_oracle(a, b);
        EXPECT_NEAR(r.t, o.t, 1e-9 * std::max(1.0, std::fabs(o.t)));
        EXPECT_NEAR(r.df, o.df, 1e-9 * o.df);
        EXPECT_NEAR(r.p, o.p, 1e-9);
    }
}

TEST(WelchT, ZeroVarianceBothClassesFlagged) {
    const auto m = two_groups({3, 3}, {5, 5, 5});
    const auto r = welch_t(m, group_labels(m, 2)).records[0];
    EXPECT_TRUE(r.degenerate);
    EXPECT_DOUBLE_EQ(r.p, 1.0);
}

TEST(WelchT, TooFewSamplesRejected) {
    const auto m = two_groups({3}, {5, 6, 7});
    EXPECT_THROW(welch_t(m, group_labels(m, 1)), DataError);
}

TEST(WelchT, InvariantUnderScalingReorderingAndLabelSwap) {
    const auto c = synth_cohort(16, 12, 3, 1.0, 77);
    const auto base = welch_t(c.matrix, c.labels);

    auto scaled = c.matrix;
    scaled.values *= 3.5;
    const auto s = welch_t(scaled, c.labels);

    auto swapped = c.labels;
    for (std::size_t i = 0; i < swapped.labels.size(); ++i) swapped.labels[i] = !swapped.labels[i];
    const auto w = welch_t(c.matrix, swapped);

    std::vector<std::size_t> perm(c.matrix.samples());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::reverse(perm.begin(), perm.end());
    const auto pm = c.matrix.select_columns(perm);
    PhenotypeLabels py;
    py.sample_ids = pm.sample_ids;
    for (auto i : perm) py.labels.push_back(c.labels.labels[i]);
    const auto r = welch_t(pm, py);

    for (std::size_t f = 0; f < base.size(); ++f) {
        EXPECT_NEAR(s.records[f].t, base.records[f].t, 1e-12);
        EXPECT_NEAR(s.records[f].p, base.records[f].p, 1e-12);
        EXPECT_NEAR(w.records[f].t, -base.records[f].t, 1e-12);
        EXPECT_NEAR(w.records[f].p, base.records[f].p, 1e-12);
        EXPECT_NEAR(r.records[f].t, base.records[f].t, 1e-12);
    }
}

TEST(WelchT, NullPValuesApproximatelyUniform) {
    const auto c = synth_cohort(30, 2000, 0, 0.0, 5);
    auto stats = welch_t(c.matrix, c.labels);
    std::vector<double> p;
    for (const auto& r : stats.records) p.push_back(r.p);
    std::sort(p.begin(), p.end());
    double d = 0;
    const double n = static_cast<double>(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        d = std::max({d, std::fabs(static_cast<double>(i + 1) / n - p[i]), std::fabs(p[i] - static_cast<double>(i) / n)});
    }
    EXPECT_LT(d, 0.05);
}

namespace {

// Moment matching written from the published formulas with Boost special
// functions and a bracketing root finder.
FeatureStats moderated_oracle(const ExpressionMatrix& m, const PhenotypeLabels& y) {
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < y.labels.size(); ++i) (y.labels[i] ? pos : neg).push_back(i);
    const double n1 = static_cast<double>(pos.size()), n2 = static_cast<double>(neg.size());
    const double d = n1 + n2 - 2;
    const std::size_t G = m.features();
    std::vector<double> diff(G), s2(G);
    for (std::size_t g = 0; g < G; ++g) {
        auto row = m.values.row(static_cast<Eigen::Index>(g));
        double m1 = 0, m2 = 0;
        for (auto i : pos) m1 += row(static_cast<Eigen::Index>(i)) / n1;
        for (auto i : neg) m2 += row(static_cast<Eigen::Index>(i)) / n2;
        double ss = 0;
        for (auto i : pos) ss += std::pow(row(static_cast<Eigen::Index>(i)) - m1, 2);
        for (auto i : neg) ss += std::pow(row(static_cast<Eigen::Index>(i)) - m2, 2);
        diff[g] = m1 - m2;
        s2[g] = ss / d;
    }
    std::vector<double> z(G);
    for (std::size_t g = 0; g < G; ++g) z[g] = std::log(s2[g]) - boost::math::digamma(d / 2) + std::log(d / 2);
    double zbar = 0;
    for (double v : z) zbar += v / static_cast<double>(G);
    double zvar = 0;
    for (double v : z) zvar += (v - zbar) * (v - zbar) / static_cast<double>(G - 1);
    const double target = zvar - boost::math::trigamma(d / 2);
    FeatureStats out;
    double d0 = std::numeric_limits<double>::infinity();
    double s0 = std::exp(zbar);
    if (target > 0) {
        std::uintmax_t iters = 200;
        const auto root = boost::math::tools::bisect(
            [&](double h) { return boost::math::trigamma(h) - target; }, 1e-8, 1e8,
            boost::math::tools::eps_tolerance<double>(50), iters);
        d0 = root.first + root.second;  // 2 * midpoint
        s0 = std::exp(zbar + boost::math::digamma(d0 / 2) - std::log(d0 / 2));
    }
    for (std::size_t g = 0; g < G; ++g) {
        const double post = std::isinf(d0) ? s0 : (d0 * s0 + d * s2[g]) / (d0 + d);
        FeatureStat r;
        r.feature_id = m.feature_ids[g];
        r.t = diff[g] / std::sqrt(post * (1 / n1 + 1 / n2));
        r.df = d0 + d;
        r.p = std::isinf(r.df) ? std::erfc(std::fabs(r.t) / std::sqrt(2.0)) : boost_two_sided(r.t, r.df);
        out.records.push_back(r);
    }
    out.prior_df = d0;
    out.prior_variance = s0;
    return out;
}

}  // namespace

TEST(ModeratedT, WithoutShrinkageIsPooledT) {
    const auto c = synth_cohort(14, 10, 2, 1.0, 3);
    const auto s = moderated_t(c.matrix, c.labels, ModeratedOptions{false});
    const auto& y = c.labels;
    for (std::size_t f = 0; f < s.size(); ++f) {
        std::vector<double> a, b;
        for (std::size_t i = 0; i < y.size(); ++i)
            (y.labels[i] ? a : b).push_back(c.matrix.values(static_cast<Eigen::Index>(f), static_cast<Eigen::Index>(i)));
        const double n1 = static_cast<double>(a.size()), n2 = static_cast<double>(b.size());
        auto mean = [](const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); };
        double ss = 0;
        for (double v : a) ss += (v - mean(a)) * (v - mean(a));
        for (double v : b) ss += (v - mean(b)) * (v - mean(b));
        const double sp = std::sqrt(ss / (n1 + n2 - 2));
        const double t = (mean(a) - mean(b)) / (sp * std::sqrt(1 / n1 + 1 / n2));
        EXPECT_NEAR(s.records[f].t, t, 1e-10);
        EXPECT_NEAR(s.records[f].df, n1 + n2 - 2, 0);
        EXPECT_NEAR(s.records[f].p, boost_two_sided(t, n1 + n2 - 2), 1e-10);
    }
}

TEST(ModeratedT, MatchesReferenceImplementation) {
    const auto c = synth_cohort(20, 200, 15, 1.2, 21);
    const auto s = moderated_t(c.matrix, c.labels);
    const auto o = moderated_oracle(c.matrix, c.labels);
    EXPECT_NEAR(s.prior_df, o.prior_df, 1e-6 * o.prior_df);
    EXPECT_NEAR(s.prior_variance, o.prior_variance, 1e-8 * o.prior_variance);
    for (std::size_t f = 0; f < s.size(); ++f) {
        EXPECT_NEAR(s.records[f].t, o.records[f].t, 1e-7 * std::max(1.0, std::fabs(o.records[f].t)));
    }
    const auto a = select_top_k(s, 20);
    const auto b = select_top_k(o, 20);
    std::size_t common = 0;
    for (const auto& id : a) common += std::count(b.begin(), b.end(), id);
    EXPECT_GE(common, 19u);
}

TEST(ModeratedT, ShrinkageIsConvex) {
    // One feature with much larger spread than the rest.
    auto c = synth_cohort(12, 60, 0, 0.0, 2);
    c.matrix.values.row(0) *= 10.0;
    const auto shrunk = moderated_t(c.matrix, c.labels);
    const auto plain = moderated_t(c.matrix, c.labels, ModeratedOptions{false});
    ASSERT_TRUE(std::isfinite(shrunk.prior_df));
    // Both statistics share the numerator, so the t ratio gives the posterior
    // variance relative to the pooled one.
    std::vector<double> a, b;
    for (std::size_t i = 0; i < c.labels.size(); ++i)
        (c.labels.labels[i] ? a : b).push_back(c.matrix.values(0, static_cast<Eigen::Index>(i)));
    auto ss = [](const std::vector<double>& v) {
        const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
        double s = 0;
        for (double x : v) s += (x - m) * (x - m);
        return s;
    };
    const double s2 = (ss(a) + ss(b)) / static_cast<double>(a.size() + b.size() - 2);
    const double ratio = plain.records[0].t / shrunk.records[0].t;
    const double post = s2 * ratio * ratio;
    EXPECT_GT(s2, shrunk.prior_variance);
    EXPECT_LT(post, s2);
    EXPECT_GT(post, shrunk.prior_variance);
}

TEST(ModeratedT, NeedsThreeFeatures) {
    const auto c = synth_cohort(10, 2, 0, 0.0, 1);
    EXPECT_THROW(moderated_t(c.matrix, c.labels), DataError);
}

TEST(SelectTopK, TieBreakByIdThenInput) {
    FeatureStats s;
    s.records = {{"b", 0, 1, 0.1, false}, {"a", 0, 1, 0.1, false}, {"c", 0, 1, 0.01, false}};
    EXPECT_EQ(select_top_k(s, 3), (std::vector<std::string>{"c", "a", "b"}));
    EXPECT_THROW(select_top_k(s, 4), ArgumentError);
}

TEST(SelectTopK, PrefixPropertyAndSortOracle) {
    std::mt19937_64 rng(8);
    std::uniform_int_distribution<int> coarse(0, 20);
    FeatureStats s;
    for (int i = 0; i < 60; ++i) {
        s.records.push_back({"f" + std::to_string(100 + i), 0, 1, coarse(rng) / 20.0, false});
    }
    auto sorted = s.records;
    std::stable_sort(sorted.begin(), sorted.end(), [](const FeatureStat& a, const FeatureStat& b) {
        return a.p != b.p ? a.p < b.p : a.feature_id < b.feature_id;
    });
    const auto top10 = select_top_k(s, 10);
    for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(top10[i], sorted[i].feature_id);
    for (std::size_t k = 1; k < 60; ++k) {
        const auto a = select_top_k(s, k);
        const auto b = select_top_k(s, k + 1);
        EXPECT_TRUE(std::equal(a.begin(), a.end(), b.begin()));
    }
}
