#include <benchmark/benchmark.h>

#include "doasel/metrics.hpp"
#include "doasel/subarray.hpp"

namespace {

const doasel::Subarray& sparse6() {
    static const doasel::Subarray sub({0.0, 0.5, 1.0, 9.0, 9.5, 10.0});
    return sub;
}

void BM_SidelobeProfile(benchmark::State& state) {
    const int n_grid = static_cast<int>(state.range(0));
    for (auto _ : state) {
        auto profile = doasel::sidelobe_profile(sparse6(), 0.2, n_grid);
        benchmark::DoNotOptimize(profile);
    }
    state.SetComplexityN(n_grid);
}
BENCHMARK(BM_SidelobeProfile)->RangeMultiplier(4)->Range(512, 32768)->Complexity();

void BM_TraMse(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(doasel::tra_mse(0.2, 10.0, sparse6(), 2048));
    }
}
BENCHMARK(BM_TraMse);

void BM_WorstCaseTraFiveAnchors(benchmark::State& state) {
    const doasel::AnchorSet anchors = doasel::anchor_set(0.2, 0.1, 5);
    for (auto _ : state) {
        benchmark::DoNotOptimize(doasel::worst_case_tra(anchors, 10.0, sparse6(), 2048));
    }
}
BENCHMARK(BM_WorstCaseTraFiveAnchors);

void BM_BesselI0Scaled(benchmark::State& state) {
    double x = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(doasel::bessel_i0_scaled(x));
        x += 0.37;
        if (x > 300.0) {
            x = 0.0;
        }
    }
}
BENCHMARK(BM_BesselI0Scaled);

} // namespace
