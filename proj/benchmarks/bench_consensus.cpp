#include <benchmark/benchmark.h>

#include <random>

#include "courtsim/deliberation.hpp"

namespace {

using namespace courtsim;

void CheckConsensus(benchmark::State& state) {
    std::mt19937 rng(9);
    std::uniform_int_distribution<int> pick(0, 2);
    std::vector<AgentStatement> statements(static_cast<std::size_t>(state.range(0)));
    for (std::size_t i = 0; i < statements.size(); ++i) {
        statements[i].agent_id = std::to_string(i + 1);
        statements[i].round = 1;
        statements[i].leaning = static_cast<Leaning>(pick(rng));
    }
    for (auto _ : state) {
        auto check = check_consensus(statements, 0.8, ThresholdRule::GreaterOrEqual);
        benchmark::DoNotOptimize(check);
    }
}
BENCHMARK(CheckConsensus)->Arg(5)->Arg(15)->Arg(101);

}  // namespace
