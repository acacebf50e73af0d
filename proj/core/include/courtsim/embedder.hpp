#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace courtsim {

/// Fixed-length, L2-normalized dense vector. The zero vector is never valid.
struct EmbeddingVector {
    std::vector<float> values;

    std::size_t dimension() const { return values.size(); }
};

class EmbedderFailure : public std::runtime_error {
public:
    explicit EmbedderFailure(const std::string& message) : std::runtime_error(message) {}
};

/// A store/query pair built with different embedders.
class EmbedderMismatch : public std::runtime_error {
public:
    explicit EmbedderMismatch(const std::string& message) : std::runtime_error(message) {}
};

/// Text-to-vector interface. identity() names the exact model/parameters so a
/// vector store can refuse queries from a different embedder.
class Embedder {
public:
    virtual ~Embedder() = default;

    /// Returns a unit-normalized vector of dimension(). Throws EmbedderFailure
    /// on zero or non-finite output, std::invalid_argument on empty text.
    virtual EmbeddingVector embed(const std::string& text) = 0;

    virtual std::size_t dimension() const = 0;
    virtual std::string identity() const = 0;
};

/// Deterministic offline embedder: hashes lower-cased word tokens into a
/// signed bag-of-words vector, then L2-normalizes. Identity encodes the
/// dimension ("bow-hash-v1:d=<dim>").
class HashingEmbedder : public Embedder {
public:
    explicit HashingEmbedder(std::size_t dimension = 256);

    EmbeddingVector embed(const std::string& text) override;
    std::size_t dimension() const override { return dimension_; }
    std::string identity() const override;

private:
    std::size_t dimension_;
};

/// Scale v to unit L2 norm. Throws EmbedderFailure when the norm is zero or
/// any component is non-finite.
EmbeddingVector normalize(std::vector<float> v);

/// Construct a HashingEmbedder from its identity string, or nullptr when the
/// identity names a different embedder family.
std::unique_ptr<Embedder> make_hashing_embedder_from_identity(const std::string& identity);

}  // namespace courtsim
