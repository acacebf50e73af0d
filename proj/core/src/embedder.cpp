#include "courtsim/embedder.hpp"

#include <cmath>

#include "util.hpp"

namespace courtsim {

EmbeddingVector normalize(std::vector<float> v) {
    double sum_sq = 0.0;
    for (float x : v) {
        if (!std::isfinite(x)) throw EmbedderFailure("non-finite embedding component");
        sum_sq += static_cast<double>(x) * static_cast<double>(x);
    }
    double norm = std::sqrt(sum_sq);
    if (norm == 0.0) throw EmbedderFailure("zero embedding vector");
    for (float& x : v) x = static_cast<float>(static_cast<double>(x) / norm);
    return EmbeddingVector{std::move(v)};
}

HashingEmbedder::HashingEmbedder(std::size_t dimension) : dimension_(dimension) {
    if (dimension_ == 0) throw std::invalid_argument("embedder dimension must be positive");
}

std::string HashingEmbedder::identity() const {
    return "bow-hash-v1:d=" + std::to_string(dimension_);
}

EmbeddingVector HashingEmbedder::embed(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("embed: text is empty");

    std::vector<float> acc(dimension_, 0.0f);
    std::string token;
    bool any_token = false;
    auto flush = [&] {
        if (token.empty()) return;
        any_token = true;
        std::uint64_t h = util::fnv1a64(token);
        std::size_t idx = static_cast<std::size_t>(h % dimension_);
        float sign = (h >> 63U) ? -1.0f : 1.0f;
        acc[idx] += sign;
        token.clear();
    };
    for (unsigned char c : text) {
        if (std::isalnum(c)) {
            token.push_back(static_cast<char>(std::tolower(c)));
        } else {
            flush();
        }
    }
    flush();
    if (!any_token) throw EmbedderFailure("text has no word tokens to embed");
    return normalize(std::move(acc));
}

std::unique_ptr<Embedder> make_hashing_embedder_from_identity(const std::string& identity) {
    const std::string prefix = "bow-hash-v1:d=";
    if (identity.rfind(prefix, 0) != 0) return nullptr;
    std::size_t dim = 0;
    try {
        dim = static_cast<std::size_t>(std::stoul(identity.substr(prefix.size())));
    } catch (const std::exception&) {
        return nullptr;
    }
    if (dim == 0) return nullptr;
    return std::make_unique<HashingEmbedder>(dim);
}

}  // namespace courtsim
