#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "courtsim/embedder.hpp"

namespace courtsim {

struct GenerationRequest {
    std::string system_prompt;
    std::string user_prompt;
    std::string model_id;
    double temperature = 0.2;
    int max_tokens = 1024;
    std::optional<int> seed;

    // Routing/log metadata: identifies the agent call this request serves.
    // The mock backend keys its script on "role:agent_id:round".
    std::string role;      // judge | prosecution | defense | adjudicator
    std::string agent_id;
    int round = 0;         // 0 = preparation phase
};

struct GenerationResponse {
    std::string text;
    double latency_ms = 0.0;
    std::string backend_id;
};

/// One entry per gateway call (generate or embed), appended in completion
/// order with a monotonic sequence number.
struct CallRecord {
    std::uint64_t seq = 0;
    std::string kind;  // "generate" | "embed"
    std::string role;
    std::string agent_id;
    int round = 0;
    std::string model_id;
    double latency_ms = 0.0;
    std::size_t prompt_chars = 0;
    std::size_t response_chars = 0;
    int attempts = 1;
    bool ok = true;
    std::string error;
    std::string backend_id;
};

class BackendUnavailable : public std::runtime_error {
public:
    explicit BackendUnavailable(const std::string& detail) : std::runtime_error(detail) {}
};

class BackendError : public std::runtime_error {
public:
    BackendError(int status, const std::string& body)
        : std::runtime_error("backend error " + std::to_string(status) + ": " + body),
          status_(status), body_(body) {}

    int status() const { return status_; }
    const std::string& body() const { return body_; }

private:
    int status_;
    std::string body_;
};

class ScriptExhausted : public std::runtime_error {
public:
    explicit ScriptExhausted(const std::string& key)
        : std::runtime_error("mock script has no response for key: " + key) {}
};

/// Retryable transport failure (connection refused, HTTP 5xx). Backends throw
/// this; the gateway retries and converts it to BackendUnavailable once the
/// attempt budget is spent.
class TransientBackendError : public std::runtime_error {
public:
    explicit TransientBackendError(const std::string& detail) : std::runtime_error(detail) {}
};

/// Transport implementation behind the gateway.
class Backend {
public:
    virtual ~Backend() = default;
    virtual std::string generate_text(const GenerationRequest& request) = 0;
    virtual std::vector<float> embed_text(const std::string& text, const std::string& model_id) = 0;
    virtual std::string id() const = 0;
};

struct RetryPolicy {
    int max_attempts = 3;
    int initial_backoff_ms = 500;
    double backoff_multiplier = 2.0;
};

/// Uniform generate/embed front end with latency capture, bounded retries and
/// an append-only call log. Safe for concurrent in-flight requests.
class LlmGateway {
public:
    explicit LlmGateway(std::unique_ptr<Backend> backend, RetryPolicy retry = {});

    /// Returns the backend text verbatim. Empty responses are allowed but
    /// recorded as a warning in the call log entry.
    GenerationResponse generate(const GenerationRequest& request);

    /// Unit-normalized embedding of non-empty text.
    EmbeddingVector embed(const std::string& text, const std::string& model_id);

    std::vector<CallRecord> call_log() const;
    std::string backend_id() const;

private:
    template <typename Fn>
    auto with_retries(Fn&& fn, int& attempts_out) -> decltype(fn());

    std::unique_ptr<Backend> backend_;
    RetryPolicy retry_;
    mutable std::mutex log_mutex_;
    std::vector<CallRecord> log_;
    std::uint64_t next_seq_ = 0;
};

/// Scripted deterministic backend for offline runs and tests. The script is a
/// JSON object mapping "role:agent_id:round" keys to either a response string
/// (returned on every call) or an array of strings (consumed one per call).
/// The optional "default" entry catches unkeyed requests. Embeddings are
/// served by a built-in deterministic hashing embedder.
class MockBackend : public Backend {
public:
    explicit MockBackend(const std::string& script_json, std::size_t embed_dimension = 256);

    static std::unique_ptr<MockBackend> from_file(const std::filesystem::path& path,
                                                  std::size_t embed_dimension = 256);

    std::string generate_text(const GenerationRequest& request) override;
    std::vector<float> embed_text(const std::string& text, const std::string& model_id) override;
    std::string id() const override { return "mock"; }

    static std::string request_key(const GenerationRequest& request);

private:
    struct Entry {
        std::vector<std::string> responses;
        bool sequential = false;  // array entries are consumed per call
        std::size_t next = 0;
    };
    std::mutex mutex_;
    std::unordered_map<std::string, Entry> entries_;
    std::optional<std::string> default_response_;
    HashingEmbedder embedder_;
};

/// OpenAI-compatible HTTP backend: POST {base_url}/v1/chat/completions and
/// POST {base_url}/v1/embeddings.
class HttpBackend : public Backend {
public:
    HttpBackend(std::string base_url, std::string api_key = "");

    std::string generate_text(const GenerationRequest& request) override;
    std::vector<float> embed_text(const std::string& text, const std::string& model_id) override;
    std::string id() const override;

private:
    std::string base_url_;
    std::string api_key_;
};

/// Remote embedder that routes through a gateway. Identity is
/// "remote:<model_id>:d=<dimension>".
class GatewayEmbedder : public Embedder {
public:
    GatewayEmbedder(LlmGateway& gateway, std::string model_id, std::size_t dimension);

    EmbeddingVector embed(const std::string& text) override;
    std::size_t dimension() const override { return dimension_; }
    std::string identity() const override;

private:
    LlmGateway& gateway_;
    std::string model_id_;
    std::size_t dimension_;
};

/// Reconstruct the embedder a store was built with from its manifest identity
/// string. Remote identities need a gateway; pass nullptr to restrict to
/// offline embedders. Throws EmbedderMismatch for unknown identities.
std::unique_ptr<Embedder> make_embedder_for_identity(const std::string& identity,
                                                     LlmGateway* gateway);

}  // namespace courtsim
