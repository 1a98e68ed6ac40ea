#include <benchmark/benchmark.h>

#include "bcl/checks.hpp"

using namespace bcl;

namespace {

const Scenario& twisted() {
    static const Scenario s = build_scenario("twisted_bundle");
    return s;
}

Vec point() { return sample_points(twisted(), 2, 1)[1]; }

void BM_ChristoffelTable(benchmark::State& st) {
    const Vec y = point();
    for (auto _ : st) {
        const FramePoint fp = evaluate_frame(twisted().adapted, y, DerivEngine{});
        benchmark::DoNotOptimize(christoffel_table(fp, twisted().adapted.c));
    }
}
BENCHMARK(BM_ChristoffelTable)->Unit(benchmark::kMicrosecond);

void BM_ChristoffelGeneral(benchmark::State& st) {
    const Vec y = point();
    for (auto _ : st) {
        const FramePoint fp = evaluate_frame(twisted().adapted, y, DerivEngine{});
        benchmark::DoNotOptimize(christoffel_general(fp, twisted().adapted.c));
    }
}
BENCHMARK(BM_ChristoffelGeneral)->Unit(benchmark::kMicrosecond);

void BM_AssembledScalar(benchmark::State& st) {
    const Vec y = point();
    for (auto _ : st) benchmark::DoNotOptimize(assemble_scalar_curvature(twisted().adapted, y, DerivEngine{}));
}
BENCHMARK(BM_AssembledScalar)->Unit(benchmark::kMillisecond);

void BM_CoordinateOracle(benchmark::State& st) {
    const Vec y = point();
    const Vec a = Vec::Zero(twisted().n_g);
    for (auto _ : st)
        benchmark::DoNotOptimize(
            scalar_curvature_coordinate_oracle(twisted().adapted, *twisted().chart, y, a, DerivEngine{}));
}
BENCHMARK(BM_CoordinateOracle)->Unit(benchmark::kMillisecond);

void BM_PointValues(benchmark::State& st) {
    const Vec y = point();
    for (auto _ : st) benchmark::DoNotOptimize(point_values(twisted(), y, DerivEngine{}));
}
BENCHMARK(BM_PointValues)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
