#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include <nlohmann/json.hpp>

#include "courtsim/knowledge_base.hpp"
#include "support/test_helpers.hpp"

using namespace courtsim;
using test::PresetEmbedder;
using test::TempDir;

namespace {

std::string random_text(std::mt19937& rng, std::size_t n) {
    std::uniform_int_distribution<int> ch('a', 'z');
    std::string text(n, ' ');
    for (auto& c : text) c = static_cast<char>(ch(rng));
    return text;
}

// Independent reassembly check: non-overlapping suffixes concatenated must
// reproduce the input.
void check_chunk_invariants(const std::string& text, std::size_t chunk_size,
                            std::size_t overlap, const std::vector<DocumentChunk>& chunks) {
    REQUIRE(!chunks.empty());
    std::string reassembled = chunks[0].text;
    CHECK(chunks[0].char_start == 0);
    for (std::size_t i = 0; i < chunks.size(); ++i) {
        CHECK(chunks[i].ordinal == static_cast<std::int64_t>(i));
        CHECK(chunks[i].char_end - chunks[i].char_start <= chunk_size);
        CHECK(chunks[i].char_start < chunks[i].char_end);
        if (i > 0) {
            CHECK(chunks[i].char_start > chunks[i - 1].char_start);
            // Exact configured overlap between consecutive chunks.
            CHECK(chunks[i - 1].char_end - chunks[i].char_start == overlap);
            reassembled += chunks[i].text.substr(
                chunks[i - 1].char_end - chunks[i].char_start);
        }
    }
    CHECK(chunks.back().char_end == text.size());  // ASCII: chars == bytes
    CHECK(reassembled == text);
}

}  // namespace

TEST_CASE("chunk_document tiles 1000 chars at (400, 50) into three spans") {
    std::mt19937 rng(1);
    std::string text = random_text(rng, 1000);
    auto chunks = chunk_document(text, "doc", 400, 50);
    REQUIRE(chunks.size() == 3);
    CHECK(chunks[0].char_start == 0);
    CHECK(chunks[0].char_end == 400);
    CHECK(chunks[1].char_start == 350);
    CHECK(chunks[1].char_end == 750);
    CHECK(chunks[2].char_start == 700);
    CHECK(chunks[2].char_end == 1000);
    check_chunk_invariants(text, 400, 50, chunks);
}

TEST_CASE("short input yields a single chunk") {
    std::mt19937 rng(2);
    std::string text = random_text(rng, 100);
    auto chunks = chunk_document(text, "doc", 400, 50);
    REQUIRE(chunks.size() == 1);
    CHECK(chunks[0].char_start == 0);
    CHECK(chunks[0].char_end == 100);
    CHECK(chunks[0].text == text);
}

TEST_CASE("invalid chunk parameters are rejected") {
    CHECK_THROWS_AS(chunk_document("abc", "doc", 50, 50), InvalidChunkParams);
    CHECK_THROWS_AS(chunk_document("abc", "doc", 0, 0), InvalidChunkParams);
    CHECK_THROWS_AS(chunk_document("abc", "doc", 10, 20), InvalidChunkParams);
    CHECK_THROWS_AS(chunk_document("", "doc", 10, 2), InvalidChunkParams);
}

TEST_CASE("chunking property: random parameter triples") {
    std::mt19937 rng(3);
    std::uniform_int_distribution<std::size_t> text_len(1, 5000);
    std::uniform_int_distribution<std::size_t> size_dist(1, 600);
    for (int trial = 0; trial < 50; ++trial) {
        std::size_t n = text_len(rng);
        std::size_t chunk_size = size_dist(rng);
        std::size_t overlap =
            chunk_size == 1 ? 0 : std::uniform_int_distribution<std::size_t>(0, chunk_size - 1)(rng);
        std::string text = random_text(rng, n);
        auto chunks = chunk_document(text, "doc", chunk_size, overlap);
        check_chunk_invariants(text, chunk_size, overlap, chunks);
    }
}

TEST_CASE("chunk offsets are UTF-8 character counts, not bytes") {
    // Three-byte Devanagari characters mixed with ASCII.
    std::string text;
    for (int i = 0; i < 40; ++i) text += "क";
    text += "abcdefgh";
    auto chunks = chunk_document(text, "doc", 20, 4);

    std::size_t total_chars = 48;
    CHECK(chunks.back().char_end == total_chars);
    for (const auto& c : chunks) {
        // Valid UTF-8 slices: no byte-level splits of the 3-byte characters.
        CHECK_NOTHROW(nlohmann::json(c.text).dump());
    }
    std::string reassembled = chunks[0].text;
    for (std::size_t i = 1; i < chunks.size(); ++i) {
        std::size_t overlap_chars = chunks[i - 1].char_end - chunks[i].char_start;
        auto starts = [&](const std::string& s) {
            std::vector<std::size_t> v;
            for (std::size_t b = 0; b < s.size();) {
                v.push_back(b);
                unsigned char c0 = static_cast<unsigned char>(s[b]);
                b += (c0 & 0x80U) == 0 ? 1 : ((c0 & 0xF0U) == 0xE0U ? 3 : 1);
            }
            v.push_back(s.size());
            return v;
        };
        auto offsets = starts(chunks[i].text);
        reassembled += chunks[i].text.substr(offsets[overlap_chars]);
    }
    CHECK(reassembled == text);
}

TEST_CASE("build_store embeds every chunk of every document") {
    std::mt19937 rng(4);
    HashingEmbedder embedder(64);
    std::vector<std::pair<std::string, std::string>> docs;
    for (int d = 0; d < 3; ++d) {
        // Word-ish text so the bag-of-words embedder always finds tokens.
        std::string text;
        while (text.size() < 1000) text += random_text(rng, 7) + " ";
        text.resize(1000);
        docs.emplace_back("doc" + std::to_string(d), text);
    }

    VectorStore store = build_store(docs, 400, 50, embedder);
    CHECK(store.size() == 9);  // 3 chunks per 1000-char document
    CHECK(store.manifest().sources == std::vector<std::string>{"doc0", "doc1", "doc2"});
    CHECK(store.manifest().embedder_id == embedder.identity());
    for (std::size_t i = 0; i < store.size(); ++i) {
        CHECK(store.chunks()[i].chunk_id == static_cast<std::int64_t>(i));
        double norm_sq = 0.0;
        for (float x : store.vectors()[i].values) norm_sq += double(x) * double(x);
        CHECK(std::abs(std::sqrt(norm_sq) - 1.0) < 1e-6);
    }

    CHECK_THROWS_AS(build_store({}, 400, 50, embedder), InvalidChunkParams);
}

TEST_CASE("persist/load round trip preserves the store") {
    std::mt19937 rng(5);
    VectorStore store = test::random_store(rng, 37, 16, "bow-hash-v1:d=16");
    TempDir dir("store");
    persist_store(store, dir.path());

    VectorStore loaded = load_store(dir.path());
    CHECK(loaded.manifest() == store.manifest());
    REQUIRE(loaded.size() == store.size());
    for (std::size_t i = 0; i < store.size(); ++i) {
        CHECK(loaded.chunks()[i] == store.chunks()[i]);
        REQUIRE(loaded.vectors()[i].values.size() == store.vectors()[i].values.size());
        for (std::size_t d = 0; d < store.vectors()[i].values.size(); ++d) {
            CHECK(loaded.vectors()[i].values[d] == store.vectors()[i].values[d]);
        }
    }
}

TEST_CASE("same corpus and parameters persist byte-identically") {
    auto build_once = [](const std::filesystem::path& dir) {
        HashingEmbedder embedder(32);
        std::vector<std::pair<std::string, std::string>> docs = {
            {"alpha", "the knife was found near the market stall by a witness "
                      "who came forward only after the alibi was published"},
            {"beta", "entrustment and conversion must both be proved before any "
                     "breach of trust can be made out against the clerk"},
        };
        persist_store(build_store(docs, 40, 10, embedder), dir);
    };
    TempDir a("det_a");
    TempDir b("det_b");
    build_once(a.path());
    build_once(b.path());
    for (const char* name : {"manifest.json", "vectors.bin", "chunks.jsonl"}) {
        CHECK(test::read_file(a.path() / name) == test::read_file(b.path() / name));
    }
}

TEST_CASE("corrupted stores are rejected on load") {
    std::mt19937 rng(6);
    VectorStore store = test::random_store(rng, 10, 8, "bow-hash-v1:d=8");
    TempDir dir("corrupt");
    persist_store(store, dir.path());

    SUBCASE("truncated vector file") {
        std::string bytes = test::read_file(dir.path() / "vectors.bin");
        bytes.resize(bytes.size() - 5);
        test::write_file(dir.path() / "vectors.bin", bytes);
        CHECK_THROWS_AS(load_store(dir.path()), CorruptStore);
    }
    SUBCASE("manifest dimension disagrees with vector data") {
        auto manifest = nlohmann::json::parse(test::read_file(dir.path() / "manifest.json"));
        manifest["dimension"] = 12;
        test::write_file(dir.path() / "manifest.json", manifest.dump(2) + "\n");
        CHECK_THROWS_AS(load_store(dir.path()), DimensionMismatch);
    }
    SUBCASE("flipped byte fails the checksum") {
        std::string bytes = test::read_file(dir.path() / "vectors.bin");
        bytes[3] = static_cast<char>(bytes[3] ^ 0x01);
        test::write_file(dir.path() / "vectors.bin", bytes);
        CHECK_THROWS_AS(load_store(dir.path()), CorruptStore);
    }
    SUBCASE("chunk count mismatch") {
        std::string lines = test::read_file(dir.path() / "chunks.jsonl");
        std::size_t cut = lines.rfind("\n", lines.size() - 2);
        lines.resize(cut + 1);
        test::write_file(dir.path() / "chunks.jsonl", lines);
        CHECK_THROWS_AS(load_store(dir.path()), CorruptStore);
    }
}

TEST_CASE("query ranks an exactly-matching vector first with score 1") {
    PresetEmbedder embedder("preset", 4);
    StoreManifest manifest;
    manifest.dimension = 4;
    manifest.embedder_id = "preset";
    manifest.chunk_size = 10;
    manifest.overlap = 0;
    manifest.sources = {"s"};
    std::vector<DocumentChunk> chunks(3);
    std::vector<EmbeddingVector> vectors;
    for (int i = 0; i < 3; ++i) {
        chunks[static_cast<std::size_t>(i)] = {i, "s", i, "text" + std::to_string(i),
                                               static_cast<std::size_t>(10 * i),
                                               static_cast<std::size_t>(10 * i + 5)};
    }
    vectors.push_back(normalize({1.0f, 0.0f, 0.0f, 0.0f}));
    vectors.push_back(normalize({0.0f, 1.0f, 0.0f, 0.0f}));
    vectors.push_back(normalize({0.0f, 0.0f, 1.0f, 0.0f}));
    VectorStore store(manifest, chunks, vectors);

    SUBCASE("self similarity") {
        embedder.set("q", {0.0f, 1.0f, 0.0f, 0.0f});
        auto results = query(store, "q", 2, embedder);
        REQUIRE(results.size() == 2);
        CHECK(results[0].chunk.chunk_id == 1);
        CHECK(results[0].score == doctest::Approx(1.0).epsilon(1e-6));
    }
    SUBCASE("orthogonal query scores zero everywhere") {
        embedder.set("q", {0.0f, 0.0f, 0.0f, 1.0f});
        auto results = query(store, "q", 3, embedder);
        REQUIRE(results.size() == 3);
        for (const auto& r : results) CHECK(r.score == doctest::Approx(0.0).epsilon(1e-6));
        // Ties broken by ascending chunk_id.
        CHECK(results[0].chunk.chunk_id == 0);
        CHECK(results[1].chunk.chunk_id == 1);
        CHECK(results[2].chunk.chunk_id == 2);
    }
    SUBCASE("identity mismatch is refused") {
        PresetEmbedder other("different", 4);
        other.set("q", {1.0f, 0.0f, 0.0f, 0.0f});
        CHECK_THROWS_AS(query(store, "q", 1, other), EmbedderMismatch);
    }
    SUBCASE("k of zero is a usage error") {
        embedder.set("q", {1.0f, 0.0f, 0.0f, 0.0f});
        CHECK_THROWS_AS(query(store, "q", 0, embedder), std::invalid_argument);
    }
}

TEST_CASE("query equals the brute-force oracle on a random store") {
    std::mt19937 rng(7);
    VectorStore store = test::random_store(rng, 200, 16, "preset");
    PresetEmbedder embedder("preset", 16);
    auto query_vec = test::random_unit_vector(rng, 16);
    embedder.set("q", query_vec);

    auto results = query(store, "q", 10, embedder);
    REQUIRE(results.size() == 10);

    // Oracle: exhaustive scoring then full sort by (score desc, id asc).
    struct Entry {
        double score;
        std::int64_t id;
    };
    std::vector<Entry> oracle;
    for (std::size_t i = 0; i < store.size(); ++i) {
        double dot = 0.0;
        for (std::size_t d = 0; d < 16; ++d) {
            dot += double(query_vec[d]) * double(store.vectors()[i].values[d]);
        }
        dot = std::clamp(dot, -1.0, 1.0);
        oracle.push_back({dot, store.chunks()[i].chunk_id});
    }
    std::sort(oracle.begin(), oracle.end(), [](const Entry& a, const Entry& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.id < b.id;
    });
    for (std::size_t i = 0; i < results.size(); ++i) {
        CHECK(results[i].chunk.chunk_id == oracle[i].id);
        CHECK(results[i].score == oracle[i].score);
    }
}

TEST_CASE("format_context renders source markers or the empty sentinel") {
    CHECK(format_context({}) == "NO CONTEXT RETRIEVED");

    DocumentChunk c42{42, "IPC", 0, "whoever causes hurt", 0, 19};
    DocumentChunk c7{7, "CrPC", 1, "the trial shall proceed", 10, 33};
    std::string block = format_context({{c42, 0.9}, {c7, 0.5}});
    CHECK(block.rfind("[Source: IPC, chunk 42]\nwhoever causes hurt", 0) == 0);
    CHECK(block.find("[Source: CrPC, chunk 7]\nthe trial shall proceed") != std::string::npos);
    // Blocks appear in result order.
    CHECK(block.find("[Source: IPC") < block.find("[Source: CrPC"));
}
