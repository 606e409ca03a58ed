// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include <vector>

#include "pedflow/estimator.hpp"

namespace {

using namespace pedflow;

std::vector<ObservationWindow> make_windows(int n) {
    std::vector<ObservationWindow> windows;
    for (int i = 0; i < n; ++i) {
        ObservationWindow w;
        w.link = 0;
        w.count = i % 3;
        w.t1_s = 15.0 * i;
        w.t2_s = 15.0 * i + 12.0;
        w.period_s = 12.0;
        w.speed_mps = 1.5;
        w.snapshot_time_s = 15.0 * i;
        windows.push_back(w);
    }
    return windows;
}

void BM_EstimateRate(benchmark::State& state) {
    const auto windows = make_windows(static_cast<int>(state.range(0)));
    const EstimatorConfig config;
    for (auto _ : state) {
        benchmark::DoNotOptimize(estimate_rate(windows, config));
    }
}
BENCHMARK(BM_EstimateRate)->Arg(16)->Arg(256);

void BM_IndependenceLedger(benchmark::State& state) {
    const auto windows = make_windows(256);
    for (auto _ : state) {
        IndependenceLedger ledger;
        for (const auto& w : windows) benchmark::DoNotOptimize(ledger.accept(w));
    }
}
BENCHMARK(BM_IndependenceLedger);

}  // namespace
