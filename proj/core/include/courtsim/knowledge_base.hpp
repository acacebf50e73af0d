#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "courtsim/embedder.hpp"

namespace courtsim {

/// One chunk of a source document. Offsets are in UTF-8 characters
/// (half-open [char_start, char_end) into the source text).
struct DocumentChunk {
    std::int64_t chunk_id = 0;  // unique within a store, 0-based insertion order
    std::string source_document;
    std::int64_t ordinal = 0;   // 0-based index within the source
    std::string text;
    std::size_t char_start = 0;
    std::size_t char_end = 0;

    bool operator==(const DocumentChunk&) const = default;
};

struct RetrievalResult {
    DocumentChunk chunk;
    double score = 0.0;  // cosine similarity in [-1, 1]
};

struct StoreManifest {
    std::size_t dimension = 0;
    std::string embedder_id;
    std::size_t chunk_size = 0;
    std::size_t overlap = 0;
    std::vector<std::string> sources;  // ingest order

    bool operator==(const StoreManifest&) const = default;
};

class InvalidChunkParams : public std::invalid_argument {
public:
    explicit InvalidChunkParams(const std::string& message)
        : std::invalid_argument(message) {}
};

class CorruptStore : public std::runtime_error {
public:
    explicit CorruptStore(const std::string& reason) : std::runtime_error(reason) {}
};

class DimensionMismatch : public std::runtime_error {
public:
    explicit DimensionMismatch(const std::string& message) : std::runtime_error(message) {}
};

/// Immutable chunk+vector collection with exhaustive cosine retrieval.
/// Built once (single writer); queries are read-only and thread-safe.
class VectorStore {
public:
    VectorStore() = default;
    VectorStore(StoreManifest manifest, std::vector<DocumentChunk> chunks,
                std::vector<EmbeddingVector> vectors);

    const StoreManifest& manifest() const { return manifest_; }
    const std::vector<DocumentChunk>& chunks() const { return chunks_; }
    const std::vector<EmbeddingVector>& vectors() const { return vectors_; }
    std::size_t size() const { return chunks_.size(); }

private:
    StoreManifest manifest_;
    std::vector<DocumentChunk> chunks_;
    std::vector<EmbeddingVector> vectors_;
};

/// Split text into chunks of at most chunk_size characters with the given
/// overlap between consecutive chunks; stride is chunk_size - overlap. Chunk
/// ids are assigned later, at store-build time. Throws InvalidChunkParams
/// when chunk_size == 0, chunk_size <= overlap, or text is empty.
std::vector<DocumentChunk> chunk_document(const std::string& text,
                                          const std::string& source,
                                          std::size_t chunk_size,
                                          std::size_t overlap);

/// Chunk and embed every document (name, text) in order. Any embedder failure
/// aborts the build; nothing is persisted by this function.
VectorStore build_store(const std::vector<std::pair<std::string, std::string>>& documents,
                        std::size_t chunk_size, std::size_t overlap, Embedder& embedder);

/// Persist to a directory: manifest.json + vectors.bin (little-endian float32
/// in chunk_id order) + chunks.jsonl. Checksums of both data files are stored
/// in the manifest.
void persist_store(const VectorStore& store, const std::filesystem::path& dir);

/// Load a persisted store. Throws CorruptStore on checksum/count mismatch and
/// DimensionMismatch when vector data disagrees with the manifest dimension.
VectorStore load_store(const std::filesystem::path& dir);

/// Exhaustive cosine ranking of all chunks; returns min(k, store size)
/// results sorted by score descending, ties broken by ascending chunk_id.
/// Throws EmbedderMismatch when embedder.identity() differs from the
/// store manifest.
std::vector<RetrievalResult> query(const VectorStore& store, const std::string& query_text,
                                   std::size_t k, Embedder& embedder);

/// Render retrieved chunks as prompt context. Each block starts with the
/// marker line `[Source: <source_document>, chunk <chunk_id>]`; an empty
/// result list yields the literal string "NO CONTEXT RETRIEVED".
std::string format_context(const std::vector<RetrievalResult>& results);

}  // namespace courtsim
