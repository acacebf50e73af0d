#include <benchmark/benchmark.h>

#include <random>
#include <string>

#include "courtsim/knowledge_base.hpp"

namespace {

std::string make_text(std::size_t n) {
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> ch('a', 'z');
    std::string text(n, ' ');
    for (auto& c : text) c = static_cast<char>(ch(rng));
    return text;
}

void ChunkDocument(benchmark::State& state) {
    std::string text = make_text(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        auto chunks = courtsim::chunk_document(text, "bench", 1000, 150);
        benchmark::DoNotOptimize(chunks);
    }
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}
BENCHMARK(ChunkDocument)->Range(1 << 12, 1 << 20);

}  // namespace
