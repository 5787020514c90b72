#include <benchmark/benchmark.h>

#include <random>

#include "pnet/dataset.hpp"
#include "pnet/kernel.hpp"
#include "pnet/pipeline.hpp"
#include "pnet/similarity.hpp"
#include "pnet/threshold.hpp"

using namespace pnet;

namespace {

SimilarityMatrix similarity(std::size_t n, std::uint64_t seed) {
    const auto c = synth_cohort(n, 500, 50, 1.0, seed);
    return pearson_matrix(c.matrix);
}

std::vector<bool> labels(std::size_t n) {
    std::vector<bool> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = i % 3 == 0;
    return y;
}

}  // namespace

static void BM_OptimizeThreshold(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto k = random_walk_kernel(similarity(n, 1), 1, 2.0);
    const auto pos = NodeSet::from_mask(labels(n));
    const auto grid = QuantileGrid::standard();
    for (auto _ : state) {
        benchmark::DoNotOptimize(optimize_thresh_by_loo(k, pos, NodeSet::all(n), grid, ScoreSpec{}));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_OptimizeThreshold)->RangeMultiplier(2)->Range(50, 400)->Complexity(benchmark::oNSquared);

static void BM_DoubleLoo(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto k = random_walk_kernel(similarity(n, 2), 1, 2.0);
    const auto pos = NodeSet::from_mask(labels(n));
    for (auto _ : state) {
        benchmark::DoNotOptimize(pnet_double_loo(k, pos, QuantileGrid::standard(), ScoreSpec{}));
    }
}
BENCHMARK(BM_DoubleLoo)->Arg(30)->Arg(60);

static void BM_RandomWalkKernel(benchmark::State& state) {
    const auto w = similarity(200, 3);
    const int p = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(random_walk_kernel(w, p, 2.0));
}
BENCHMARK(BM_RandomWalkKernel)->Arg(1)->Arg(8)->Arg(50);

static void BM_Pearson(benchmark::State& state) {
    const auto c = synth_cohort(static_cast<std::size_t>(state.range(0)), 1000, 50, 1.0, 4);
    for (auto _ : state) benchmark::DoNotOptimize(pearson_matrix(c.matrix));
}
BENCHMARK(BM_Pearson)->Arg(50)->Arg(200);

static void BM_Kendall(benchmark::State& state) {
    const auto c = synth_cohort(static_cast<std::size_t>(state.range(0)), 1000, 50, 1.0, 5);
    for (auto _ : state) benchmark::DoNotOptimize(kendall_matrix(c.matrix));
}
BENCHMARK(BM_Kendall)->Arg(50)->Arg(100);
BENCHMARK_MAIN();
