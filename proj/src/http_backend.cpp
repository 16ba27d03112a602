// SPDX-License-Identifier: Apache-2.0
#include "famlens/http_backend.hpp"

#include "famlens/error.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdlib>
#include <thread>

namespace famlens {

namespace {

using nlohmann::json;

constexpr std::chrono::milliseconds kBackoffCap{4000};

std::string require_api_key(const std::string& env_name) {
    if (env_name.empty()) {
        throw Error::config("api_key_env must name an environment variable");
    }
    const char* value = std::getenv(env_name.c_str());
    if (value == nullptr || *value == '\0') {
        throw Error::config("environment variable " + env_name + " is not set");
    }
    return value;
}

void validate_http_config(const HttpProviderConfig& config) {
    if (config.base_url.empty()) {
        throw Error::config("http provider requires a base_url");
    }
    if (config.base_url.find("http://") != 0 && config.base_url.find("https://") != 0) {
        throw Error::config("base_url must start with http:// or https://: " + config.base_url);
    }
    if (config.max_retries < 0 || config.max_retries > 3) {
        throw Error::config("max_retries must lie in [0,3]");
    }
    if (config.timeout_seconds <= 0) {
        throw Error::config("timeout_seconds must be positive");
    }
    if (config.initial_backoff.count() <= 0) {
        throw Error::config("initial_backoff must be positive");
    }
}

// Splits "https://host[:port]/prefix" into the httplib origin and the path
// prefix ("" when the URL has no path).
std::pair<std::string, std::string> split_origin(const std::string& url) {
    const auto scheme_end = url.find("://");
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
        return {url, ""};
    }
    std::string prefix = url.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/') {
        prefix.pop_back();
    }
    return {url.substr(0, path_start), prefix};
}

bool retryable_status(int status) {
    return status == 408 || status == 429 || (status >= 500 && status <= 599);
}

std::string status_detail(const HttpPostResponse& rsp) {
    if (rsp.status == 0) {
        return "transport failure: " + (rsp.error.empty() ? std::string("unknown") : rsp.error);
    }
    std::string detail = "http status " + std::to_string(rsp.status);
    if (!rsp.body.empty()) {
        detail += ": " + rsp.body.substr(0, 200);
    }
    return detail;
}

/// Posts with retry. Transient outcomes retry up to config.max_retries times
/// with strictly increasing delays; everything else surfaces immediately.
HttpPostResponse post_with_retry(const HttpProviderConfig& config,
                                 const HttpTransport& transport,
                                 const Sleeper& sleeper,
                                 const HttpPostRequest& req) {
    HttpPostResponse rsp;
    for (int attempt = 0; ; ++attempt) {
        rsp = transport(req);
        if (rsp.status == 401 || rsp.status == 403) {
            throw Error::backend("authentication failed (" + status_detail(rsp) + ")");
        }
        if (rsp.status >= 200 && rsp.status <= 299) {
            return rsp;
        }
        if (rsp.status != 0 && !retryable_status(rsp.status)) {
            throw Error::backend(status_detail(rsp));
        }
        if (attempt >= config.max_retries) {
            throw Error::backend("request failed after " + std::to_string(attempt + 1) +
                                 " attempts (" + status_detail(rsp) + ")");
        }
        const auto delay = std::min<std::chrono::milliseconds>(
            config.initial_backoff * (1LL << attempt), kBackoffCap);
        sleeper(delay);
    }
}

json parse_response_json(const std::string& body) {
    json parsed = json::parse(body, nullptr, false);
    if (parsed.is_discarded()) {
        throw Error::backend("response body is not valid JSON: " + body.substr(0, 200));
    }
    return parsed;
}

HttpTransport default_or(HttpTransport transport, int timeout_seconds) {
    if (transport) {
        return transport;
    }
    return make_default_transport(timeout_seconds);
}

Sleeper default_or(Sleeper sleeper) {
    if (sleeper) {
        return sleeper;
    }
    return [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

} // namespace

HttpTransport make_default_transport(int timeout_seconds) {
    return [timeout_seconds](const HttpPostRequest& req) -> HttpPostResponse {
        const auto scheme_end = req.url.find("://");
        const auto path_start = req.url.find('/', scheme_end + 3);
        if (scheme_end == std::string::npos || path_start == std::string::npos) {
            return {0, "", "malformed url: " + req.url};
        }
        const std::string host = req.url.substr(0, path_start);
        const std::string path = req.url.substr(path_start);

        httplib::Client client(host);
        client.set_connection_timeout(timeout_seconds, 0);
        client.set_read_timeout(timeout_seconds, 0);
        client.set_write_timeout(timeout_seconds, 0);

        httplib::Headers headers;
        std::string content_type = "application/json";
        for (const auto& [name, value] : req.headers) {
            if (name == "Content-Type") {
                content_type = value;
            } else {
                headers.emplace(name, value);
            }
        }

        auto result = client.Post(path, headers, req.body, content_type);
        if (!result) {
            return {0, "", httplib::to_string(result.error())};
        }
        return {result->status, result->body, ""};
    };
}

HttpChatProvider::HttpChatProvider(HttpProviderConfig config, HttpTransport transport, Sleeper sleeper)
    : config_(std::move(config)),
      transport_(default_or(std::move(transport), config_.timeout_seconds)),
      sleeper_(default_or(std::move(sleeper))) {
    validate_http_config(config_);
    if (config_.chat_model.empty()) {
        throw Error::config("http chat provider requires a chat_model");
    }
    api_key_ = require_api_key(config_.api_key_env);
}

std::string HttpChatProvider::chat_complete(const ChatRequest& req) {
    validate_request(req);

    json messages = json::array();
    if (!req.system_prompt.empty()) {
        messages.push_back({{"role", "system"}, {"content", req.system_prompt}});
    }
    for (const auto& msg : req.messages) {
        messages.push_back({{"role", std::string(to_string(msg.role))}, {"content", msg.content}});
    }
    json body = {
        {"model", config_.chat_model},
        {"messages", std::move(messages)},
        {"temperature", req.temperature},
    };
    if (req.max_output_tokens) {
        body["max_tokens"] = *req.max_output_tokens;
    }

    const auto [origin, prefix] = split_origin(config_.base_url);
    HttpPostRequest post{
        origin + prefix + "/chat/completions",
        {{"Authorization", "Bearer " + api_key_}, {"Content-Type", "application/json"}},
        body.dump(),
    };
    const HttpPostResponse rsp = post_with_retry(config_, transport_, sleeper_, post);

    const json parsed = parse_response_json(rsp.body);
    if (!parsed.contains("choices") || !parsed["choices"].is_array() || parsed["choices"].empty()) {
        throw Error::backend("response has no choices: " + rsp.body.substr(0, 200));
    }
    const json& message = parsed["choices"][0].value("message", json::object());
    if (!message.contains("content") || !message["content"].is_string()) {
        throw Error::backend("response choice has no message content");
    }
    return message["content"].get<std::string>();
}

std::string HttpChatProvider::provider_id() const {
    return "http:" + config_.base_url + ":" + config_.chat_model;
}

HttpEmbeddingProvider::HttpEmbeddingProvider(HttpProviderConfig config, HttpTransport transport,
                                             Sleeper sleeper)
    : config_(std::move(config)),
      transport_(default_or(std::move(transport), config_.timeout_seconds)),
      sleeper_(default_or(std::move(sleeper))) {
    validate_http_config(config_);
    if (config_.embedding_model.empty()) {
        throw Error::config("http embedding provider requires an embedding_model");
    }
    if (config_.embedding_dimension == 0) {
        throw Error::config("embedding_dimension must be positive");
    }
    api_key_ = require_api_key(config_.api_key_env);
}

EmbeddingVector HttpEmbeddingProvider::embed_text(std::string_view text) {
    if (text.empty()) {
        throw Error::validation("embedding input must be non-empty");
    }

    json body = {
        {"model", config_.embedding_model},
        {"input", std::string(text)},
    };

    const auto [origin, prefix] = split_origin(config_.base_url);
    HttpPostRequest post{
        origin + prefix + "/embeddings",
        {{"Authorization", "Bearer " + api_key_}, {"Content-Type", "application/json"}},
        body.dump(),
    };
    const HttpPostResponse rsp = post_with_retry(config_, transport_, sleeper_, post);

    const json parsed = parse_response_json(rsp.body);
    if (!parsed.contains("data") || !parsed["data"].is_array() || parsed["data"].empty()) {
        throw Error::backend("embedding response has no data: " + rsp.body.substr(0, 200));
    }
    const json& embedding = parsed["data"][0].value("embedding", json::array());
    if (!embedding.is_array() || embedding.empty()) {
        throw Error::backend("embedding response has no vector");
    }
    EmbeddingVector vec;
    vec.values.reserve(embedding.size());
    for (const auto& v : embedding) {
        if (!v.is_number()) {
            throw Error::backend("embedding vector has a non-numeric entry");
        }
        vec.values.push_back(v.get<double>());
    }
    validate_embedding(vec, config_.embedding_dimension);
    return vec;
}

std::string HttpEmbeddingProvider::provider_id() const {
    return "http:" + config_.base_url + ":" + config_.embedding_model;
}

} // namespace famlens
