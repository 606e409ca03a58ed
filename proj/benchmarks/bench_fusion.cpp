// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "pedflow/corpus.hpp"
#include "pedflow/fusion.hpp"

namespace {

using namespace pedflow;

LabeledCorpus bench_corpus() {
    CorpusConfig config;
    config.pedestrian_tracks = 60;
    config.duration_s = 180.0;
    config.seed = 12;
    return generate_detection_corpus(config);
}

void BM_ScoreCorpusDF(benchmark::State& state) {
    const LabeledCorpus corpus = bench_corpus();
    const FusionParams params;
    for (auto _ : state) {
        benchmark::DoNotOptimize(score_corpus(corpus, FusionMethod::distributed, params));
    }
}
BENCHMARK(BM_ScoreCorpusDF)->Unit(benchmark::kMillisecond);

void BM_ScoreCorpusMLF(benchmark::State& state) {
    const LabeledCorpus corpus = bench_corpus();
    const FusionParams params;
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            score_corpus(corpus, FusionMethod::max_likelihood, params));
    }
}
BENCHMARK(BM_ScoreCorpusMLF)->Unit(benchmark::kMillisecond);

void BM_GenerateCorpus(benchmark::State& state) {
    CorpusConfig config;
    config.pedestrian_tracks = 60;
    config.duration_s = 180.0;
    std::uint64_t seed = 1;
    for (auto _ : state) {
        config.seed = seed++;
        benchmark::DoNotOptimize(generate_detection_corpus(config));
    }
}
BENCHMARK(BM_GenerateCorpus)->Unit(benchmark::kMillisecond);

}  // namespace
