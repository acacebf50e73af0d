#include "courtsim/knowledge_base.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

#include "util.hpp"

namespace courtsim {

namespace {

using nlohmann::json;

constexpr const char* kManifestFile = "manifest.json";
constexpr const char* kVectorsFile = "vectors.bin";
constexpr const char* kChunksFile = "chunks.jsonl";

void append_le_float(std::string& out, float f) {
    std::uint32_t bits = 0;
    std::memcpy(&bits, &f, sizeof(bits));
    out.push_back(static_cast<char>(bits & 0xFFU));
    out.push_back(static_cast<char>((bits >> 8U) & 0xFFU));
    out.push_back(static_cast<char>((bits >> 16U) & 0xFFU));
    out.push_back(static_cast<char>((bits >> 24U) & 0xFFU));
}

float read_le_float(const unsigned char* p) {
    std::uint32_t bits = static_cast<std::uint32_t>(p[0]) |
                         (static_cast<std::uint32_t>(p[1]) << 8U) |
                         (static_cast<std::uint32_t>(p[2]) << 16U) |
                         (static_cast<std::uint32_t>(p[3]) << 24U);
    float f = 0.0f;
    std::memcpy(&f, &bits, sizeof(f));
    return f;
}

json chunk_to_json(const DocumentChunk& c) {
    json j;
    j["chunk_id"] = c.chunk_id;
    j["source_document"] = c.source_document;
    j["ordinal"] = c.ordinal;
    j["char_start"] = c.char_start;
    j["char_end"] = c.char_end;
    j["text"] = c.text;
    return j;
}

DocumentChunk chunk_from_json(const json& j) {
    DocumentChunk c;
    c.chunk_id = j.at("chunk_id").get<std::int64_t>();
    c.source_document = j.at("source_document").get<std::string>();
    c.ordinal = j.at("ordinal").get<std::int64_t>();
    c.char_start = j.at("char_start").get<std::size_t>();
    c.char_end = j.at("char_end").get<std::size_t>();
    c.text = j.at("text").get<std::string>();
    return c;
}

}  // namespace

VectorStore::VectorStore(StoreManifest manifest, std::vector<DocumentChunk> chunks,
                         std::vector<EmbeddingVector> vectors)
    : manifest_(std::move(manifest)), chunks_(std::move(chunks)), vectors_(std::move(vectors)) {
    if (chunks_.size() != vectors_.size()) {
        throw CorruptStore("chunk table and vector table sizes differ");
    }
    for (const auto& v : vectors_) {
        if (v.dimension() != manifest_.dimension) {
            throw DimensionMismatch("vector dimension " + std::to_string(v.dimension()) +
                                    " differs from manifest dimension " +
                                    std::to_string(manifest_.dimension));
        }
    }
}

std::vector<DocumentChunk> chunk_document(const std::string& text, const std::string& source,
                                          std::size_t chunk_size, std::size_t overlap) {
    if (chunk_size == 0 || chunk_size <= overlap) {
        throw InvalidChunkParams("chunk_size must be positive and greater than overlap");
    }
    if (text.empty()) {
        throw InvalidChunkParams("cannot chunk empty text");
    }

    auto starts = util::utf8_char_starts(text);
    const std::size_t n_chars = starts.size() - 1;
    const std::size_t stride = chunk_size - overlap;

    std::vector<DocumentChunk> chunks;
    std::size_t begin = 0;
    std::int64_t ordinal = 0;
    for (;;) {
        std::size_t end = std::min(begin + chunk_size, n_chars);
        DocumentChunk c;
        c.source_document = source;
        c.ordinal = ordinal++;
        c.char_start = begin;
        c.char_end = end;
        c.text = text.substr(starts[begin], starts[end] - starts[begin]);
        chunks.push_back(std::move(c));
        if (end == n_chars) break;
        begin += stride;
    }
    return chunks;
}

VectorStore build_store(const std::vector<std::pair<std::string, std::string>>& documents,
                        std::size_t chunk_size, std::size_t overlap, Embedder& embedder) {
    if (documents.empty()) {
        throw InvalidChunkParams("build_store requires at least one document");
    }

    StoreManifest manifest;
    manifest.dimension = embedder.dimension();
    manifest.embedder_id = embedder.identity();
    manifest.chunk_size = chunk_size;
    manifest.overlap = overlap;

    std::vector<DocumentChunk> chunks;
    std::vector<EmbeddingVector> vectors;
    std::int64_t next_id = 0;
    for (const auto& [name, text] : documents) {
        manifest.sources.push_back(name);
        for (auto& chunk : chunk_document(text, name, chunk_size, overlap)) {
            chunk.chunk_id = next_id++;
            EmbeddingVector v;
            try {
                v = embedder.embed(chunk.text);
            } catch (const EmbedderFailure& e) {
                throw EmbedderFailure("embedding failed for chunk " +
                                      std::to_string(chunk.chunk_id) + ": " + e.what());
            }
            if (v.dimension() != manifest.dimension) {
                throw DimensionMismatch("embedder returned dimension " +
                                        std::to_string(v.dimension()) + ", expected " +
                                        std::to_string(manifest.dimension));
            }
            chunks.push_back(std::move(chunk));
            vectors.push_back(std::move(v));
        }
    }
    return VectorStore(std::move(manifest), std::move(chunks), std::move(vectors));
}

void persist_store(const VectorStore& store, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);

    std::string chunks_text;
    for (const auto& c : store.chunks()) {
        chunks_text += chunk_to_json(c).dump();
        chunks_text += '\n';
    }

    std::string vectors_bytes;
    vectors_bytes.reserve(store.size() * store.manifest().dimension * 4);
    for (const auto& v : store.vectors()) {
        for (float f : v.values) append_le_float(vectors_bytes, f);
    }

    json m;
    m["format_version"] = 1;
    m["dimension"] = store.manifest().dimension;
    m["embedder_id"] = store.manifest().embedder_id;
    m["chunk_size"] = store.manifest().chunk_size;
    m["overlap"] = store.manifest().overlap;
    m["sources"] = store.manifest().sources;
    m["chunk_count"] = store.size();
    m["vectors_checksum"] = "fnv1a64:" + util::fnv1a64_hex(vectors_bytes);
    m["chunks_checksum"] = "fnv1a64:" + util::fnv1a64_hex(chunks_text);

    util::write_text_file(dir / kChunksFile, chunks_text);
    util::write_text_file(dir / kVectorsFile, vectors_bytes);
    util::write_text_file(dir / kManifestFile, m.dump(2) + "\n");
}

VectorStore load_store(const std::filesystem::path& dir) {
    json m;
    try {
        m = json::parse(util::read_text_file(dir / kManifestFile));
    } catch (const std::exception& e) {
        throw CorruptStore(std::string("cannot read manifest: ") + e.what());
    }

    StoreManifest manifest;
    std::size_t chunk_count = 0;
    std::string vectors_checksum;
    std::string chunks_checksum;
    try {
        manifest.dimension = m.at("dimension").get<std::size_t>();
        manifest.embedder_id = m.at("embedder_id").get<std::string>();
        manifest.chunk_size = m.at("chunk_size").get<std::size_t>();
        manifest.overlap = m.at("overlap").get<std::size_t>();
        manifest.sources = m.at("sources").get<std::vector<std::string>>();
        chunk_count = m.at("chunk_count").get<std::size_t>();
        vectors_checksum = m.at("vectors_checksum").get<std::string>();
        chunks_checksum = m.at("chunks_checksum").get<std::string>();
    } catch (const json::exception& e) {
        throw CorruptStore(std::string("manifest missing field: ") + e.what());
    }

    std::string chunks_text;
    std::string vectors_bytes;
    try {
        chunks_text = util::read_text_file(dir / kChunksFile);
        vectors_bytes = util::read_text_file(dir / kVectorsFile);
    } catch (const std::exception& e) {
        throw CorruptStore(std::string("missing store file: ") + e.what());
    }

    if ("fnv1a64:" + util::fnv1a64_hex(chunks_text) != chunks_checksum) {
        throw CorruptStore("chunk file checksum mismatch");
    }
    if ("fnv1a64:" + util::fnv1a64_hex(vectors_bytes) != vectors_checksum) {
        throw CorruptStore("vector file checksum mismatch");
    }

    std::vector<DocumentChunk> chunks;
    std::size_t pos = 0;
    while (pos < chunks_text.size()) {
        std::size_t eol = chunks_text.find('\n', pos);
        if (eol == std::string::npos) eol = chunks_text.size();
        std::string line = chunks_text.substr(pos, eol - pos);
        pos = eol + 1;
        if (util::trim(line).empty()) continue;
        try {
            chunks.push_back(chunk_from_json(json::parse(line)));
        } catch (const json::exception& e) {
            throw CorruptStore(std::string("bad chunk record: ") + e.what());
        }
    }
    if (chunks.size() != chunk_count) {
        throw CorruptStore("chunk count mismatch: manifest says " + std::to_string(chunk_count) +
                           ", found " + std::to_string(chunks.size()));
    }

    if (chunk_count > 0) {
        if (vectors_bytes.size() % (4 * chunk_count) == 0) {
            std::size_t actual_dim = vectors_bytes.size() / (4 * chunk_count);
            if (actual_dim != manifest.dimension) {
                throw DimensionMismatch("manifest dimension " + std::to_string(manifest.dimension) +
                                        " but vectors have dimension " + std::to_string(actual_dim));
            }
        } else {
            throw CorruptStore("vector file size is not a whole number of vectors");
        }
    } else if (!vectors_bytes.empty()) {
        throw CorruptStore("vector file non-empty for empty chunk table");
    }

    std::vector<EmbeddingVector> vectors;
    vectors.reserve(chunk_count);
    const auto* data = reinterpret_cast<const unsigned char*>(vectors_bytes.data());
    for (std::size_t i = 0; i < chunk_count; ++i) {
        EmbeddingVector v;
        v.values.resize(manifest.dimension);
        for (std::size_t d = 0; d < manifest.dimension; ++d) {
            v.values[d] = read_le_float(data + (i * manifest.dimension + d) * 4);
        }
        vectors.push_back(std::move(v));
    }

    return VectorStore(std::move(manifest), std::move(chunks), std::move(vectors));
}

std::vector<RetrievalResult> query(const VectorStore& store, const std::string& query_text,
                                   std::size_t k, Embedder& embedder) {
    if (k == 0) throw std::invalid_argument("query: k must be >= 1");
    if (embedder.identity() != store.manifest().embedder_id) {
        throw EmbedderMismatch("store was built with embedder '" + store.manifest().embedder_id +
                               "', queried with '" + embedder.identity() + "'");
    }

    EmbeddingVector q = embedder.embed(query_text);
    if (q.dimension() != store.manifest().dimension) {
        throw DimensionMismatch("query embedding dimension mismatch");
    }

    struct Scored {
        double score;
        std::size_t index;
    };
    std::vector<Scored> scored;
    scored.reserve(store.size());
    for (std::size_t i = 0; i < store.size(); ++i) {
        const auto& v = store.vectors()[i].values;
        double dot = 0.0;
        for (std::size_t d = 0; d < v.size(); ++d) {
            dot += static_cast<double>(q.values[d]) * static_cast<double>(v[d]);
        }
        dot = std::clamp(dot, -1.0, 1.0);
        scored.push_back({dot, i});
    }
    std::sort(scored.begin(), scored.end(), [&](const Scored& a, const Scored& b) {
        if (a.score != b.score) return a.score > b.score;
        return store.chunks()[a.index].chunk_id < store.chunks()[b.index].chunk_id;
    });

    std::size_t take = std::min(k, scored.size());
    std::vector<RetrievalResult> results;
    results.reserve(take);
    for (std::size_t i = 0; i < take; ++i) {
        results.push_back({store.chunks()[scored[i].index], scored[i].score});
    }
    return results;
}

std::string format_context(const std::vector<RetrievalResult>& results) {
    if (results.empty()) return "NO CONTEXT RETRIEVED";
    std::string out;
    for (std::size_t i = 0; i < results.size(); ++i) {
        if (i > 0) out += "\n\n";
        out += "[Source: " + results[i].chunk.source_document + ", chunk " +
               std::to_string(results[i].chunk.chunk_id) + "]\n";
        out += results[i].chunk.text;
    }
    return out;
}

}  // namespace courtsim
