#include <benchmark/benchmark.h>

#include "doasel/mlp.hpp"
#include "doasel/rng.hpp"

namespace {

const doasel::MlpModel& reference_model() {
    static const doasel::MlpModel model = [] {
        doasel::RandomStream rng(5);
        return doasel::make_mlp({2, 16, 32, 64, 32, 16, 21}, rng);
    }();
    return model;
}

void BM_MlpForward(benchmark::State& state) {
    double u = -0.9;
    for (auto _ : state) {
        benchmark::DoNotOptimize(doasel::forward(reference_model(), u, 10.0));
        u += 0.001;
        if (u > 0.9) {
            u = -0.9;
        }
    }
}
BENCHMARK(BM_MlpForward);

void BM_MlpGradients(benchmark::State& state) {
    doasel::RandomStream rng(9);
    std::vector<double> scores(21);
    for (double& s : scores) {
        s = rng.uniform();
    }
    const doasel::TrainingSample sample{0.2, 10.0, doasel::select_top_m(scores, 6)};
    for (auto _ : state) {
        benchmark::DoNotOptimize(doasel::gradients(reference_model(), sample));
    }
}
BENCHMARK(BM_MlpGradients);

} // namespace
