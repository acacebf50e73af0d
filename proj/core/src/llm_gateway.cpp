#include "courtsim/llm_gateway.hpp"

#include <chrono>
#include <cmath>
#include <thread>

namespace courtsim {

LlmGateway::LlmGateway(std::unique_ptr<Backend> backend, RetryPolicy retry)
    : backend_(std::move(backend)), retry_(retry) {
    if (!backend_) throw std::invalid_argument("gateway requires a backend");
    if (retry_.max_attempts < 1) throw std::invalid_argument("max_attempts must be >= 1");
}

template <typename Fn>
auto LlmGateway::with_retries(Fn&& fn, int& attempts_out) -> decltype(fn()) {
    double backoff_ms = static_cast<double>(retry_.initial_backoff_ms);
    attempts_out = 0;
    for (;;) {
        ++attempts_out;
        try {
            return fn();
        } catch (const TransientBackendError& e) {
            if (attempts_out >= retry_.max_attempts) {
                throw BackendUnavailable(std::string(e.what()) + " (after " +
                                         std::to_string(attempts_out) + " attempts)");
            }
            std::this_thread::sleep_for(
                std::chrono::milliseconds(static_cast<std::int64_t>(backoff_ms)));
            backoff_ms *= retry_.backoff_multiplier;
        }
    }
}

GenerationResponse LlmGateway::generate(const GenerationRequest& request) {
    if (request.user_prompt.empty()) {
        throw std::invalid_argument("generate: user_prompt is empty");
    }
    if (request.temperature < 0.0 || request.temperature > 2.0) {
        throw std::invalid_argument("generate: temperature out of range [0, 2]");
    }
    if (request.max_tokens <= 0) {
        throw std::invalid_argument("generate: max_tokens must be positive");
    }

    CallRecord record;
    record.kind = "generate";
    record.role = request.role;
    record.agent_id = request.agent_id;
    record.round = request.round;
    record.model_id = request.model_id;
    record.prompt_chars = request.system_prompt.size() + request.user_prompt.size();
    record.backend_id = backend_->id();

    auto start = std::chrono::steady_clock::now();
    try {
        std::string text = with_retries(
            [&] { return backend_->generate_text(request); }, record.attempts);
        record.latency_ms = std::chrono::duration<double, std::milli>(
                                std::chrono::steady_clock::now() - start).count();
        record.response_chars = text.size();
        if (text.empty()) record.error = "warning: backend returned empty text";
        {
            std::lock_guard lock(log_mutex_);
            record.seq = next_seq_++;
            log_.push_back(record);
        }
        return GenerationResponse{std::move(text), record.latency_ms, record.backend_id};
    } catch (const std::exception& e) {
        record.latency_ms = std::chrono::duration<double, std::milli>(
                                std::chrono::steady_clock::now() - start).count();
        record.ok = false;
        record.error = e.what();
        {
            std::lock_guard lock(log_mutex_);
            record.seq = next_seq_++;
            log_.push_back(record);
        }
        throw;
    }
}

EmbeddingVector LlmGateway::embed(const std::string& text, const std::string& model_id) {
    if (text.empty()) throw std::invalid_argument("embed: text is empty");

    CallRecord record;
    record.kind = "embed";
    record.role = "embedder";
    record.model_id = model_id;
    record.prompt_chars = text.size();
    record.backend_id = backend_->id();

    auto start = std::chrono::steady_clock::now();
    try {
        std::vector<float> raw = with_retries(
            [&] { return backend_->embed_text(text, model_id); }, record.attempts);
        for (float x : raw) {
            if (!std::isfinite(x)) throw EmbedderFailure("backend returned non-finite embedding");
        }
        EmbeddingVector v = normalize(std::move(raw));
        record.latency_ms = std::chrono::duration<double, std::milli>(
                                std::chrono::steady_clock::now() - start).count();
        record.response_chars = v.dimension();
        {
            std::lock_guard lock(log_mutex_);
            record.seq = next_seq_++;
            log_.push_back(record);
        }
        return v;
    } catch (const std::exception& e) {
        record.latency_ms = std::chrono::duration<double, std::milli>(
                                std::chrono::steady_clock::now() - start).count();
        record.ok = false;
        record.error = e.what();
        {
            std::lock_guard lock(log_mutex_);
            record.seq = next_seq_++;
            log_.push_back(record);
        }
        throw;
    }
}

std::vector<CallRecord> LlmGateway::call_log() const {
    std::lock_guard lock(log_mutex_);
    return log_;
}

std::string LlmGateway::backend_id() const { return backend_->id(); }

GatewayEmbedder::GatewayEmbedder(LlmGateway& gateway, std::string model_id, std::size_t dimension)
    : gateway_(gateway), model_id_(std::move(model_id)), dimension_(dimension) {
    if (dimension_ == 0) throw std::invalid_argument("embedder dimension must be positive");
}

EmbeddingVector GatewayEmbedder::embed(const std::string& text) {
    EmbeddingVector v = gateway_.embed(text, model_id_);
    if (v.dimension() != dimension_) {
        throw EmbedderFailure("remote embedder returned dimension " +
                              std::to_string(v.dimension()) + ", expected " +
                              std::to_string(dimension_));
    }
    return v;
}

std::string GatewayEmbedder::identity() const {
    return "remote:" + model_id_ + ":d=" + std::to_string(dimension_);
}

std::unique_ptr<Embedder> make_embedder_for_identity(const std::string& identity,
                                                     LlmGateway* gateway) {
    if (auto hashing = make_hashing_embedder_from_identity(identity)) return hashing;

    const std::string prefix = "remote:";
    if (identity.rfind(prefix, 0) == 0) {
        std::size_t d_pos = identity.rfind(":d=");
        if (d_pos != std::string::npos && d_pos > prefix.size()) {
            std::string model = identity.substr(prefix.size(), d_pos - prefix.size());
            std::size_t dim = 0;
            try {
                dim = static_cast<std::size_t>(std::stoul(identity.substr(d_pos + 3)));
            } catch (const std::exception&) {
                dim = 0;
            }
            if (dim > 0) {
                if (gateway == nullptr) {
                    throw EmbedderMismatch("store requires remote embedder '" + identity +
                                           "' but no backend gateway is configured");
                }
                return std::make_unique<GatewayEmbedder>(*gateway, model, dim);
            }
        }
    }
    throw EmbedderMismatch("unknown embedder identity: " + identity);
}

}  // namespace courtsim
