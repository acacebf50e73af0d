#include <benchmark/benchmark.h>

#include <random>

#include "courtsim/knowledge_base.hpp"

namespace {

using namespace courtsim;

// Embedder that hands back one fixed random vector; isolates the scan cost.
class FixedEmbedder : public Embedder {
public:
    FixedEmbedder(std::size_t dim, std::uint32_t seed) : dim_(dim) {
        std::mt19937 rng(seed);
        std::normal_distribution<double> normal(0.0, 1.0);
        std::vector<float> v(dim);
        for (auto& x : v) x = static_cast<float>(normal(rng));
        vec_ = normalize(std::move(v));
    }
    EmbeddingVector embed(const std::string&) override { return vec_; }
    std::size_t dimension() const override { return dim_; }
    std::string identity() const override { return "bench-fixed"; }

private:
    std::size_t dim_;
    EmbeddingVector vec_;
};

VectorStore make_store(std::size_t count, std::size_t dim) {
    std::mt19937 rng(11);
    std::normal_distribution<double> normal(0.0, 1.0);

    StoreManifest manifest;
    manifest.dimension = dim;
    manifest.embedder_id = "bench-fixed";
    manifest.chunk_size = 1000;
    manifest.overlap = 150;
    manifest.sources = {"bench"};

    std::vector<DocumentChunk> chunks;
    std::vector<EmbeddingVector> vectors;
    for (std::size_t i = 0; i < count; ++i) {
        DocumentChunk c;
        c.chunk_id = static_cast<std::int64_t>(i);
        c.source_document = "bench";
        c.ordinal = static_cast<std::int64_t>(i);
        c.text = "chunk " + std::to_string(i);
        c.char_start = i * 10;
        c.char_end = i * 10 + c.text.size();
        chunks.push_back(std::move(c));

        std::vector<float> v(dim);
        for (auto& x : v) x = static_cast<float>(normal(rng));
        vectors.push_back(normalize(std::move(v)));
    }
    return VectorStore(std::move(manifest), std::move(chunks), std::move(vectors));
}

void QueryTop5(benchmark::State& state) {
    auto count = static_cast<std::size_t>(state.range(0));
    auto dim = static_cast<std::size_t>(state.range(1));
    VectorStore store = make_store(count, dim);
    FixedEmbedder embedder(dim, 23);
    for (auto _ : state) {
        auto results = query(store, "q", 5, embedder);
        benchmark::DoNotOptimize(results);
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}
BENCHMARK(QueryTop5)
    ->Args({100, 384})
    ->Args({1000, 384})
    ->Args({5000, 384})
    ->Args({1000, 16});

}  // namespace
