#include <benchmark/benchmark.h>

#include "doasel/metrics.hpp"
#include "doasel/select.hpp"

namespace {

doasel::SelectionQuery query(int n, int m, int n_anchors, int n_grid) {
    return {doasel::anchor_set(0.2, 0.1, n_anchors), 10.0,
            doasel::ArrayGeometry(n, 0.5), m, n_grid};
}

void BM_GreedySelect(benchmark::State& state) {
    const auto q = query(21, static_cast<int>(state.range(0)), 5, 1024);
    for (auto _ : state) {
        benchmark::DoNotOptimize(doasel::select_greedy_tra(q));
    }
}
BENCHMARK(BM_GreedySelect)->Arg(4)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_GreedySelectSingleAnchor(benchmark::State& state) {
    const auto q = query(21, 6, 1, 1024);
    for (auto _ : state) {
        benchmark::DoNotOptimize(doasel::select_greedy_tra(q));
    }
}
BENCHMARK(BM_GreedySelectSingleAnchor)->Unit(benchmark::kMillisecond);

void BM_ExhaustiveSelect(benchmark::State& state) {
    const auto q = query(11, 4, 5, 1024);
    for (auto _ : state) {
        benchmark::DoNotOptimize(doasel::select_exhaustive_tra(q));
    }
}
BENCHMARK(BM_ExhaustiveSelect)->Unit(benchmark::kMillisecond);

void BM_PslConstrainedSelect(benchmark::State& state) {
    const auto q = query(21, 6, 1, 1024);
    const double delta = static_cast<double>(state.range(0)) / 100.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(doasel::select_psl_c(q, delta));
    }
}
BENCHMARK(BM_PslConstrainedSelect)->Arg(100)->Arg(50)->Unit(benchmark::kMillisecond);

} // namespace
