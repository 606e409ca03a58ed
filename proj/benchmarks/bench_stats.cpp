// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "pedflow/stats.hpp"

namespace {

void BM_ChiSquaredQuantile(benchmark::State& state) {
    const double dof = static_cast<double>(state.range(0));
    double p = 0.049;
    for (auto _ : state) {
        p = p >= 0.95 ? 0.05 : p + 0.009;
        benchmark::DoNotOptimize(pedflow::chi_squared_quantile(p, dof));
    }
}
BENCHMARK(BM_ChiSquaredQuantile)->Arg(2)->Arg(22)->Arg(100);

void BM_ChiSquaredCdf(benchmark::State& state) {
    double x = 0.0;
    for (auto _ : state) {
        x = x >= 40.0 ? 0.5 : x + 0.37;
        benchmark::DoNotOptimize(pedflow::chi_squared_cdf(x, 22.0));
    }
}
BENCHMARK(BM_ChiSquaredCdf);

}  // namespace
