#include <nlohmann/json.hpp>

#include "courtsim/llm_gateway.hpp"
#include "util.hpp"

namespace courtsim {

namespace {
using nlohmann::json;
}

MockBackend::MockBackend(const std::string& script_json, std::size_t embed_dimension)
    : embedder_(embed_dimension) {
    json doc;
    try {
        doc = json::parse(script_json);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("malformed mock script: ") + e.what());
    }
    if (!doc.is_object()) {
        throw std::invalid_argument("mock script must be a JSON object");
    }
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        Entry entry;
        if (it.value().is_string()) {
            entry.responses.push_back(it.value().get<std::string>());
        } else if (it.value().is_array()) {
            entry.sequential = true;
            for (const auto& item : it.value()) {
                if (!item.is_string()) {
                    throw std::invalid_argument("mock script arrays must contain strings: " +
                                                it.key());
                }
                entry.responses.push_back(item.get<std::string>());
            }
        } else {
            throw std::invalid_argument("mock script values must be strings or arrays: " +
                                        it.key());
        }
        if (it.key() == "default") {
            if (!entry.sequential && !entry.responses.empty()) {
                default_response_ = entry.responses.front();
                continue;
            }
            throw std::invalid_argument("mock script 'default' must be a single string");
        }
        entries_.emplace(it.key(), std::move(entry));
    }
}

std::unique_ptr<MockBackend> MockBackend::from_file(const std::filesystem::path& path,
                                                    std::size_t embed_dimension) {
    return std::make_unique<MockBackend>(util::read_text_file(path), embed_dimension);
}

std::string MockBackend::request_key(const GenerationRequest& request) {
    return request.role + ":" + request.agent_id + ":" + std::to_string(request.round);
}

std::string MockBackend::generate_text(const GenerationRequest& request) {
    const std::string key = request_key(request);
    std::lock_guard lock(mutex_);
    auto it = entries_.find(key);
    if (it != entries_.end()) {
        Entry& entry = it->second;
        if (!entry.sequential) return entry.responses.front();
        if (entry.next < entry.responses.size()) return entry.responses[entry.next++];
        // Sequence consumed; fall through to the default, if any.
    }
    if (default_response_) return *default_response_;
    throw ScriptExhausted(key);
}

std::vector<float> MockBackend::embed_text(const std::string& text,
                                           const std::string& /*model_id*/) {
    return embedder_.embed(text).values;
}

}  // namespace courtsim
