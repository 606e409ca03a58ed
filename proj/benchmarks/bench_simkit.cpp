// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "pedflow/graph_io.hpp"
#include "pedflow/simkit.hpp"

namespace {

using namespace pedflow;

void BM_SimulationMinute(benchmark::State& state) {
    const NetworkGraph graph = make_benchmark_graph(1.62);
    ScenarioConfig config;
    config.duration_s = 60.0;
    std::uint64_t seed = 1;
    for (auto _ : state) {
        config.seed = seed++;
        Simulation sim(graph, config);
        benchmark::DoNotOptimize(sim.run());
    }
}
BENCHMARK(BM_SimulationMinute)->Unit(benchmark::kMillisecond);

void BM_SectorSegmentIntersection(benchmark::State& state) {
    const Vec2 a{0.0, 0.0};
    const Vec2 b{100.0, 7.0};
    double x = 0.0;
    for (auto _ : state) {
        x = x > 90.0 ? 0.0 : x + 1.7;
        benchmark::DoNotOptimize(
            sector_segment_intersection({x, 3.0}, 0.4, 20.0, 160.0, a, b));
    }
}
BENCHMARK(BM_SectorSegmentIntersection);

void BM_Sense(benchmark::State& state) {
    const NetworkGraph graph = make_benchmark_graph(1.62);
    ScenarioConfig config;
    config.duration_s = 120.0;
    config.seed = 7;
    Simulation sim(graph, config);
    sim.step(60.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sim.sense());
    }
}
BENCHMARK(BM_Sense);

}  // namespace
