#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "pnet/scoring.hpp"
#include "test_util.hpp"

using namespace pnet;

namespace {

const std::vector<ScoreKind> kAllKinds = {ScoreKind::average, ScoreKind::nearest, ScoreKind::knn,
                                          ScoreKind::total,   ScoreKind::diff,    ScoreKind::dnorm};

NodeScore score(const std::vector<double>& row, const std::vector<bool>& pos, ScoreKind kind, std::size_t k = 3) {
    const auto p = NodeSet::from_mask(pos);
    return score_node(row, p, p.complement(), ScoreSpec{kind, k});
}

}  // namespace

TEST(ScoreNode, ZeroRow) {
    const std::vector<double> row(5, 0.0);
    const std::vector<bool> pos = {true, false, true, false, false};
    for (auto kind : kAllKinds) {
        const auto s = score(row, pos, kind);
        EXPECT_EQ(s.value, 0.0) << to_string(kind);
        const bool normalised = kind == ScoreKind::total || kind == ScoreKind::dnorm;
        EXPECT_EQ(s.zero_denominator, normalised) << to_string(kind);
    }
}

TEST(ScoreNode, OneHotRow) {
    const double w = 0.7;
    const std::vector<double> row = {0, w, 0, 0, 0};
    const std::vector<bool> pos = {false, true, true, false, true};
    EXPECT_DOUBLE_EQ(score(row, pos, ScoreKind::average).value, w / 3);
    EXPECT_DOUBLE_EQ(score(row, pos, ScoreKind::nearest).value, w);
    EXPECT_DOUBLE_EQ(score(row, pos, ScoreKind::knn, 1).value, w);
    EXPECT_DOUBLE_EQ(score(row, pos, ScoreKind::knn, 5).value, w);
    EXPECT_DOUBLE_EQ(score(row, pos, ScoreKind::diff).value, w);
    EXPECT_DOUBLE_EQ(score(row, pos, ScoreKind::total).value, 1.0);
    EXPECT_DOUBLE_EQ(score(row, pos, ScoreKind::dnorm).value, 1.0);
}

TEST(ScoreNode, HandSetSixNodeInstance) {
    const std::vector<double> row = {0.0, 0.9, 0.3, 0.5, 0.1, 0.4};
    const std::vector<bool> pos = {false, true, false, true, true, false};
    // positives 0.9, 0.5, 0.1 (sum 1.5); negatives 0.0, 0.3, 0.4 (sum 0.7)
    EXPECT_NEAR(score(row, pos, ScoreKind::average).value, 0.5, 1e-14);
    EXPECT_NEAR(score(row, pos, ScoreKind::nearest).value, 0.9, 1e-14);
    EXPECT_NEAR(score(row, pos, ScoreKind::knn, 2).value, 1.4, 1e-14);
    EXPECT_NEAR(score(row, pos, ScoreKind::total).value, 1.5 / 2.2, 1e-14);
    EXPECT_NEAR(score(row, pos, ScoreKind::diff).value, 0.8, 1e-14);
    EXPECT_NEAR(score(row, pos, ScoreKind::dnorm).value, 0.8 / 2.2, 1e-14);
}

TEST(ScoreNode, MatchesDefinitionOracle) {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int rep = 0; rep < 200; ++rep) {
        std::vector<double> row(12);
        for (auto& v : row) v = u(rng);
        const auto pos = fixtures::random_labels(12, rng);
        for (auto kind : kAllKinds) {
            const double got = score(row, pos, kind, 4).value;
            const double want = oracle::score(row, pos, oracle::complement(pos), kind, 4);
            EXPECT_NEAR(got, want, 1e-14 * std::max(1.0, std::fabs(want)));
        }
    }
}

TEST(ScoreNode, KnnClampsToPositiveCount) {
    const std::vector<double> row = {0.2, 0.4, 0.1, 0.8};
    const std::vector<bool> pos = {true, true, false, false};
    EXPECT_DOUBLE_EQ(score(row, pos, ScoreKind::knn, 10).value, 0.6);
    EXPECT_DOUBLE_EQ(score(row, pos, ScoreKind::knn, 2).value / 2, score(row, pos, ScoreKind::average).value);
}

TEST(ScoreNode, KnnTieTakesLowerIndex) {
    // Tie at the k-th weight: the sum is the same either way but the
    // selection is deterministic; check through a sum that exposes order.
    const std::vector<double> row = {0.5, 0.5, 0.5, 0.0};
    const std::vector<bool> pos = {true, true, true, false};
    EXPECT_DOUBLE_EQ(score(row, pos, ScoreKind::knn, 2).value, 1.0);
}

TEST(ScoreNode, EmptySetsRejected) {
    const std::vector<double> row = {0.1, 0.2};
    EXPECT_THROW(score(row, {false, false}, ScoreKind::average), DataError);
    EXPECT_THROW(score(row, {true, true}, ScoreKind::diff), DataError);
    EXPECT_NO_THROW(score(row, {true, true}, ScoreKind::nearest));
}

TEST(ScoreNode, UnlabelledNodesIgnored) {
    const std::vector<double> row = {0.3, 0.6, 9.0, 0.2};
    const auto pos = NodeSet(4, {1});
    const auto neg = NodeSet(4, {0, 3});  // node 2 unlabelled
    EXPECT_DOUBLE_EQ(score_node(row, pos, neg, ScoreSpec{ScoreKind::diff, 1}).value, 0.6 - 0.5);
}

TEST(ScoreNode, ScalingProperties) {
    std::mt19937_64 rng(32);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> row(10);
    for (auto& v : row) v = u(rng);
    const auto pos = fixtures::random_labels(10, rng);
    std::vector<double> scaled = row;
    for (auto& v : scaled) v *= 4.0;
    for (auto kind : kAllKinds) {
        const double a = score(row, pos, kind).value;
        const double b = score(scaled, pos, kind).value;
        const bool invariant = kind == ScoreKind::total || kind == ScoreKind::dnorm;
        EXPECT_NEAR(b, invariant ? a : 4.0 * a, 1e-13) << to_string(kind);
    }
    const double total = score(row, pos, ScoreKind::total).value;
    EXPECT_NEAR(score(row, pos, ScoreKind::dnorm).value, 2 * total - 1, 1e-12);
}

TEST(ScoreAll, IdentityKernelOneHot) {
    KernelMatrix k{fixtures::make_ids(3), Matrix::Identity(3, 3), "identity"};
    const auto pos = NodeSet(3, {1});
    const auto s = score_all(k, pos, ScoreSpec{ScoreKind::diff, 1}, NodeSet::all(3));
    EXPECT_EQ(s.scores, (std::vector<double>{-1.0, 1.0, -1.0}));
}

TEST(ScoreAll, MatchesPerNodeLoopAndRankingInvariance) {
    std::mt19937_64 rng(33);
    const auto k = fixtures::random_kernel(25, rng);
    const auto mask = fixtures::random_labels(25, rng);
    const auto pos = NodeSet::from_mask(mask);
    const NodeSet targets(25, {0, 3, 4, 10, 17, 24});
    for (auto kind : kAllKinds) {
        const ScoreSpec spec{kind, 3};
        const auto s = score_all(k, pos, spec, targets);
        ASSERT_EQ(s.size(), targets.size());
        for (std::size_t t = 0; t < targets.size(); ++t) {
            const auto i = targets.members()[t];
            std::vector<double> row(25);
            for (std::size_t j = 0; j < 25; ++j) row[j] = k.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            EXPECT_EQ(s.scores[t], score_node(row, pos, spec));
            EXPECT_EQ(s.sample_ids[t], k.sample_ids[i]);
        }
        KernelMatrix scaled = k;
        scaled.values *= 2.5;
        EXPECT_EQ(rank_samples(score_all(scaled, pos, spec, NodeSet::all(25))),
                  rank_samples(score_all(k, pos, spec, NodeSet::all(25))));
    }
}

TEST(ScoreAll, PermutationEquivariant) {
    std::mt19937_64 rng(34);
    const auto k = fixtures::random_kernel(8, rng);
    const auto mask = fixtures::random_labels(8, rng);
    const std::vector<std::size_t> perm = {5, 2, 7, 0, 3, 1, 6, 4};
    KernelMatrix kp = k;
    std::vector<bool> mp(8);
    for (std::size_t a = 0; a < 8; ++a) {
        mp[a] = mask[perm[a]];
        for (std::size_t b = 0; b < 8; ++b)
            kp.values(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
                k.values(static_cast<Eigen::Index>(perm[a]), static_cast<Eigen::Index>(perm[b]));
    }
    for (auto kind : kAllKinds) {
        const auto s = score_all(k, NodeSet::from_mask(mask), ScoreSpec{kind, 2}, NodeSet::all(8));
        const auto sp = score_all(kp, NodeSet::from_mask(mp), ScoreSpec{kind, 2}, NodeSet::all(8));
        for (std::size_t a = 0; a < 8; ++a) EXPECT_NEAR(sp.scores[a], s.scores[perm[a]], 1e-14);
    }
}

TEST(RankSamples, DescendingWithIdTieBreak) {
    ScoreVector s{{"c", "a", "b", "d"}, {0.5, 0.5, 0.9, 0.1}, 0};
    EXPECT_EQ(rank_samples(s), (std::vector<std::string>{"b", "a", "c", "d"}));
    ScoreVector same{{"z", "y", "x"}, {1, 1, 1}, 0};
    EXPECT_EQ(rank_samples(same), (std::vector<std::string>{"x", "y", "z"}));
}

TEST(RankSamples, MatchesStableSortOracle) {
    std::mt19937_64 rng(35);
    std::uniform_int_distribution<int> coarse(0, 5);
    ScoreVector s;
    for (int i = 0; i < 40; ++i) {
        s.sample_ids.push_back("id" + std::to_string(100 - i));
        s.scores.push_back(coarse(rng));
    }
    std::vector<std::size_t> idx(40);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return s.sample_ids[a] < s.sample_ids[b]; });
    std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return s.scores[a] > s.scores[b]; });
    std::vector<std::string> want;
    for (auto i : idx) want.push_back(s.sample_ids[i]);
    EXPECT_EQ(rank_samples(s), want);
}

TEST(ScoresIo, RoundTrip) {
    ScoreVector s{{"a", "b", "c"}, {0.25, -1.0 / 3.0, 7.0}, 0};
    fixtures::TempDir dir;
    save_scores(s, dir / "s.tsv");
    const auto back = load_scores(dir / "s.tsv");
    EXPECT_EQ(back.sample_ids, s.sample_ids);
    EXPECT_EQ(back.scores, s.scores);
}
