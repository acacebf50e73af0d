#include <benchmark/benchmark.h>

#include <random>

#include "courtsim/metrics.hpp"

namespace {

std::string make_statement(std::size_t words, std::uint32_t seed) {
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> ch('a', 'z');
    std::string text;
    for (std::size_t i = 0; i < words; ++i) {
        std::string w(5, ' ');
        for (auto& c : w) c = static_cast<char>(ch(rng));
        text += w;
        text += ' ';
    }
    return text;
}

void GroundingScore(benchmark::State& state) {
    std::string text = make_statement(static_cast<std::size_t>(state.range(0)), 3);
    std::vector<std::string> keywords = {"knife", "alibi", "witness", "ledger", "kerosene"};
    for (auto _ : state) {
        double score = courtsim::grounding_score(text, keywords);
        benchmark::DoNotOptimize(score);
    }
}
BENCHMARK(GroundingScore)->Range(64, 1 << 14);

void LatencyStats(benchmark::State& state) {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> ms(0.0, 5000.0);
    std::vector<double> latencies(static_cast<std::size_t>(state.range(0)));
    for (auto& v : latencies) v = ms(rng);
    for (auto _ : state) {
        auto stats = courtsim::latency_stats(latencies);
        benchmark::DoNotOptimize(stats);
    }
}
BENCHMARK(LatencyStats)->Range(8, 1 << 14);

}  // namespace
