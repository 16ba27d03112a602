// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "famlens/backend.hpp"

#include <chrono>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace famlens {

/// Remote endpoint settings. The API key is never stored in config files or
/// flags; `api_key_env` names the environment variable that holds it.
struct HttpProviderConfig {
    std::string base_url;
    std::string chat_model;
    std::string embedding_model;
    std::string api_key_env = "FAMLENS_API_KEY";
    std::size_t embedding_dimension = 768;
    int timeout_seconds = 60;
    int max_retries = 3;
    std::chrono::milliseconds initial_backoff{250};
};

struct HttpPostRequest {
    std::string url;
    std::vector<std::pair<std::string, std::string>> headers;
    std::string body;
};

/// status == 0 means the request never produced an HTTP response; `error`
/// then carries the transport failure text.
struct HttpPostResponse {
    int status = 0;
    std::string body;
    std::string error;
};

using HttpTransport = std::function<HttpPostResponse(const HttpPostRequest&)>;
using Sleeper = std::function<void(std::chrono::milliseconds)>;

/// Transport backed by the bundled HTTP client. `timeout_seconds` applies to
/// connect, read, and write individually.
HttpTransport make_default_transport(int timeout_seconds);

/// Chat-completions client. Transient failures (transport errors, 408, 429,
/// 5xx) are retried with capped, strictly increasing backoff; authentication
/// failures are surfaced immediately.
class HttpChatProvider final : public ChatProvider {
public:
    HttpChatProvider(HttpProviderConfig config,
                     HttpTransport transport = nullptr,
                     Sleeper sleeper = nullptr);

    std::string chat_complete(const ChatRequest& req) override;
    std::string provider_id() const override;

private:
    HttpProviderConfig config_;
    std::string api_key_;
    HttpTransport transport_;
    Sleeper sleeper_;
};

class HttpEmbeddingProvider final : public EmbeddingProvider {
public:
    HttpEmbeddingProvider(HttpProviderConfig config,
                          HttpTransport transport = nullptr,
                          Sleeper sleeper = nullptr);

    EmbeddingVector embed_text(std::string_view text) override;
    std::size_t dimension() const override { return config_.embedding_dimension; }
    std::string provider_id() const override;

private:
    HttpProviderConfig config_;
    std::string api_key_;
    HttpTransport transport_;
    Sleeper sleeper_;
};

} // namespace famlens
