#include <benchmark/benchmark.h>

#include "gmtk/crofton.hpp"
#include "gmtk/measure.hpp"
#include "gmtk/partition.hpp"
#include "gmtk/selftest.hpp"

namespace {

void BM_JacobianJe(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    gmtk::Rng rng(1);
    Eigen::MatrixXd d(n, n - 1);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n - 1; ++c) d(r, c) = rng.gaussian();
    for (auto _ : state) {
        benchmark::DoNotOptimize(gmtk::jacobian_Je_matrix(d, n - 1).value);
    }
}
BENCHMARK(BM_JacobianJe)->Arg(3)->Arg(5)->Arg(8);

void BM_AreaMeasureParabola(benchmark::State& state) {
    gmtk::Scene s = gmtk::scenes::parabola();
    for (auto _ : state) {
        benchmark::DoNotOptimize(gmtk::area_measure(s.patches[0]).value);
    }
}
BENCHMARK(BM_AreaMeasureParabola);

void BM_CroftonSegment(benchmark::State& state) {
    gmtk::Scene s = gmtk::scenes::segment();
    gmtk::CroftonConfig cfg;
    cfg.samples = state.range(0);
    cfg.seed = 3;
    for (auto _ : state) {
        benchmark::DoNotOptimize(gmtk::crofton_estimate(s, 1, cfg).value);
    }
    state.SetItemsProcessed(state.iterations() * cfg.samples);
}
BENCHMARK(BM_CroftonSegment)->Arg(1024)->Arg(8192)->Unit(benchmark::kMillisecond);

void BM_PartitionConstants(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(gmtk::partition_constants(n).M);
    }
}
BENCHMARK(BM_PartitionConstants)->Arg(2)->Arg(4)->Arg(6);

void BM_PartitionCircle(benchmark::State& state) {
    gmtk::Scene s = gmtk::scenes::circle();
    for (auto _ : state) {
        benchmark::DoNotOptimize(gmtk::rectifiable_partition(s, 1).patches.size());
    }
    state.SetLabel("pieces");
}
BENCHMARK(BM_PartitionCircle)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
