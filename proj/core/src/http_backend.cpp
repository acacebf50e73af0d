#include <httplib.h>

#include <nlohmann/json.hpp>

#include "courtsim/llm_gateway.hpp"

namespace courtsim {

namespace {

using nlohmann::json;

// Split "http://host:port/prefix" into client target and path prefix.
std::pair<std::string, std::string> split_base_url(const std::string& base_url) {
    std::size_t scheme_end = base_url.find("://");
    std::size_t path_start = std::string::npos;
    if (scheme_end != std::string::npos) {
        path_start = base_url.find('/', scheme_end + 3);
    } else {
        path_start = base_url.find('/');
    }
    if (path_start == std::string::npos) return {base_url, ""};
    std::string prefix = base_url.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    return {base_url.substr(0, path_start), prefix};
}

json post_json(const std::string& base_url, const std::string& api_key,
               const std::string& endpoint, const json& payload) {
    auto [host, prefix] = split_base_url(base_url);
    httplib::Client client(host);
    client.set_connection_timeout(10, 0);
    client.set_read_timeout(300, 0);

    httplib::Headers headers;
    if (!api_key.empty()) headers.emplace("Authorization", "Bearer " + api_key);

    auto res = client.Post(prefix + endpoint, headers, payload.dump(), "application/json");
    if (!res) {
        throw TransientBackendError("connection to " + base_url + " failed: " +
                                    httplib::to_string(res.error()));
    }
    if (res->status >= 500) {
        throw TransientBackendError("HTTP " + std::to_string(res->status) + " from " + base_url);
    }
    if (res->status != 200) {
        throw BackendError(res->status, res->body);
    }
    try {
        return json::parse(res->body);
    } catch (const json::exception& e) {
        throw BackendError(res->status, std::string("unparseable response body: ") + e.what());
    }
}

}  // namespace

HttpBackend::HttpBackend(std::string base_url, std::string api_key)
    : base_url_(std::move(base_url)), api_key_(std::move(api_key)) {
    if (base_url_.empty()) throw std::invalid_argument("http backend requires a base URL");
}

std::string HttpBackend::id() const { return "http:" + base_url_; }

std::string HttpBackend::generate_text(const GenerationRequest& request) {
    json payload;
    payload["model"] = request.model_id;
    payload["messages"] = json::array();
    if (!request.system_prompt.empty()) {
        payload["messages"].push_back({{"role", "system"}, {"content", request.system_prompt}});
    }
    payload["messages"].push_back({{"role", "user"}, {"content", request.user_prompt}});
    payload["temperature"] = request.temperature;
    payload["max_tokens"] = request.max_tokens;
    if (request.seed) payload["seed"] = *request.seed;

    json body = post_json(base_url_, api_key_, "/v1/chat/completions", payload);
    try {
        return body.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
        throw BackendError(200, std::string("unexpected chat completion shape: ") + e.what());
    }
}

std::vector<float> HttpBackend::embed_text(const std::string& text, const std::string& model_id) {
    json payload;
    payload["model"] = model_id;
    payload["input"] = text;

    json body = post_json(base_url_, api_key_, "/v1/embeddings", payload);
    try {
        return body.at("data").at(0).at("embedding").get<std::vector<float>>();
    } catch (const json::exception& e) {
        throw BackendError(200, std::string("unexpected embeddings shape: ") + e.what());
    }
}

}  // namespace courtsim
