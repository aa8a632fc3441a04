#include <benchmark/benchmark.h>

#include "doasel/rng.hpp"
#include "doasel/subarray.hpp"

namespace {

void BM_EnumerateSubarrays(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const int m = static_cast<int>(state.range(1));
    for (auto _ : state) {
        auto all = doasel::enumerate_subarrays(n, m);
        benchmark::DoNotOptimize(all);
    }
}
BENCHMARK(BM_EnumerateSubarrays)->Args({11, 4})->Args({21, 6})->Args({21, 8});

void BM_UniqueSubarraySet(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const int m = static_cast<int>(state.range(1));
    for (auto _ : state) {
        auto set = doasel::unique_subarray_set(n, m);
        benchmark::DoNotOptimize(set);
    }
}
BENCHMARK(BM_UniqueSubarraySet)->Args({11, 4})->Args({21, 6})->Args({21, 8});

void BM_AlignLayout(benchmark::State& state) {
    doasel::RandomStream rng(7);
    std::vector<doasel::SelectionVector> inputs;
    for (int i = 0; i < 256; ++i) {
        std::vector<std::uint8_t> bits(21, 0);
        int ones = 0;
        for (auto& b : bits) {
            b = rng.uniform() < 0.4 ? 1 : 0;
            ones += b;
        }
        if (ones == 0) {
            bits[0] = 1;
        }
        inputs.emplace_back(bits);
    }
    std::size_t i = 0;
    for (auto _ : state) {
        auto aligned = doasel::align_layout(inputs[i++ & 255]);
        benchmark::DoNotOptimize(aligned);
    }
}
BENCHMARK(BM_AlignLayout);

} // namespace
