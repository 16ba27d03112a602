// SPDX-License-Identifier: Apache-2.0
#include "famlens/error.hpp"
#include "famlens/http_backend.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <vector>

using namespace famlens;
using nlohmann::json;

namespace {

struct EnvGuard {
    explicit EnvGuard(const char* name, const char* value) : name_(name) {
        ::setenv(name, value, 1);
    }
    ~EnvGuard() { ::unsetenv(name_); }
    const char* name_;
};

HttpProviderConfig chat_config() {
    HttpProviderConfig cfg;
    cfg.base_url = "https://api.test.invalid/v1";
    cfg.chat_model = "test-model";
    cfg.embedding_model = "test-embed";
    cfg.embedding_dimension = 3;
    return cfg;
}

ChatRequest simple_request() {
    ChatRequest req;
    req.system_prompt = "sys";
    req.messages = {{ChatMessage::Role::user, "hello"}};
    req.temperature = 0.5;
    req.tag = "t";
    return req;
}

std::string chat_body(const std::string& content) {
    json doc = {{"choices", {{{"message", {{"content", content}}}}}}};
    return doc.dump();
}

/// Scripted transport: pops responses in order and records requests/delays.
struct FakeTransport {
    std::vector<HttpPostResponse> responses;
    std::vector<HttpPostRequest> seen;
    std::vector<std::chrono::milliseconds> delays;
    std::size_t next = 0;

    HttpTransport transport() {
        return [this](const HttpPostRequest& req) {
            seen.push_back(req);
            if (next >= responses.size()) {
                return HttpPostResponse{0, "", "fake transport exhausted"};
            }
            return responses[next++];
        };
    }
    Sleeper sleeper() {
        return [this](std::chrono::milliseconds d) { delays.push_back(d); };
    }
};

} // namespace

TEST_CASE("http chat provider succeeds on first attempt and shapes the wire format") {
    EnvGuard key("FAMLENS_API_KEY", "sk-test");
    FakeTransport fake;
    fake.responses = {{200, chat_body("hi there"), ""}};
    HttpChatProvider provider(chat_config(), fake.transport(), fake.sleeper());

    CHECK(provider.chat_complete(simple_request()) == "hi there");
    REQUIRE(fake.seen.size() == 1);
    CHECK(fake.seen[0].url == "https://api.test.invalid/v1/chat/completions");

    bool has_auth = false;
    for (const auto& [name, value] : fake.seen[0].headers) {
        if (name == "Authorization") {
            has_auth = true;
            CHECK(value == "Bearer sk-test");
        }
    }
    CHECK(has_auth);

    const json body = json::parse(fake.seen[0].body);
    CHECK(body["model"] == "test-model");
    CHECK(body["temperature"] == 0.5);
    REQUIRE(body["messages"].size() == 2);
    CHECK(body["messages"][0]["role"] == "system");
    CHECK(body["messages"][0]["content"] == "sys");
    CHECK(body["messages"][1]["role"] == "user");
    CHECK(body["messages"][1]["content"] == "hello");
    CHECK(fake.delays.empty());
}

TEST_CASE("transient failures retry with strictly increasing capped backoff") {
    EnvGuard key("FAMLENS_API_KEY", "sk-test");
    FakeTransport fake;
    fake.responses = {{429, "slow down", ""},
                      {500, "oops", ""},
                      {0, "", "connection reset"},
                      {200, chat_body("finally"), ""}};
    HttpProviderConfig cfg = chat_config();
    cfg.max_retries = 3;
    HttpChatProvider provider(cfg, fake.transport(), fake.sleeper());

    CHECK(provider.chat_complete(simple_request()) == "finally");
    CHECK(fake.seen.size() == 4);
    REQUIRE(fake.delays.size() == 3);
    CHECK(fake.delays[0] == std::chrono::milliseconds(250));
    CHECK(fake.delays[1] == std::chrono::milliseconds(500));
    CHECK(fake.delays[2] == std::chrono::milliseconds(1000));
    for (std::size_t i = 1; i < fake.delays.size(); ++i) {
        CHECK(fake.delays[i] > fake.delays[i - 1]);
        CHECK(fake.delays[i] <= std::chrono::milliseconds(4000));
    }
}

TEST_CASE("retries exhaust into a backend error naming the attempt count") {
    EnvGuard key("FAMLENS_API_KEY", "sk-test");
    FakeTransport fake;
    fake.responses = {{503, "down", ""}, {503, "down", ""}, {503, "down", ""}};
    HttpProviderConfig cfg = chat_config();
    cfg.max_retries = 2;
    HttpChatProvider provider(cfg, fake.transport(), fake.sleeper());

    CHECK_THROWS_WITH_AS(provider.chat_complete(simple_request()),
                         doctest::Contains("after 3 attempts"), Error);
    CHECK(fake.seen.size() == 3);
}

TEST_CASE("authentication failures surface immediately without retry") {
    EnvGuard key("FAMLENS_API_KEY", "sk-test");
    for (const int status : {401, 403}) {
        FakeTransport fake;
        fake.responses = {{status, "denied", ""}};
        HttpChatProvider provider(chat_config(), fake.transport(), fake.sleeper());
        CHECK_THROWS_WITH_AS(provider.chat_complete(simple_request()),
                             doctest::Contains("authentication failed"), Error);
        CHECK(fake.seen.size() == 1);
        CHECK(fake.delays.empty());
    }
}

TEST_CASE("non-retryable client errors surface immediately") {
    EnvGuard key("FAMLENS_API_KEY", "sk-test");
    FakeTransport fake;
    fake.responses = {{404, "not found", ""}};
    HttpChatProvider provider(chat_config(), fake.transport(), fake.sleeper());
    CHECK_THROWS_AS(provider.chat_complete(simple_request()), Error);
    CHECK(fake.seen.size() == 1);
    CHECK(fake.delays.empty());
}

TEST_CASE("missing API key environment variable is a config error") {
    ::unsetenv("FAMLENS_API_KEY");
    FakeTransport fake;
    CHECK_THROWS_WITH_AS(HttpChatProvider(chat_config(), fake.transport(), fake.sleeper()),
                         doctest::Contains("FAMLENS_API_KEY"), Error);
}

TEST_CASE("config validation rejects bad retry counts and URLs") {
    EnvGuard key("FAMLENS_API_KEY", "sk-test");
    FakeTransport fake;
    HttpProviderConfig cfg = chat_config();
    cfg.max_retries = 4;
    CHECK_THROWS_AS(HttpChatProvider(cfg, fake.transport(), fake.sleeper()), Error);
    cfg = chat_config();
    cfg.base_url = "ftp://wrong";
    CHECK_THROWS_AS(HttpChatProvider(cfg, fake.transport(), fake.sleeper()), Error);
    cfg = chat_config();
    cfg.chat_model.clear();
    CHECK_THROWS_AS(HttpChatProvider(cfg, fake.transport(), fake.sleeper()), Error);
}

TEST_CASE("malformed chat responses are backend errors") {
    EnvGuard key("FAMLENS_API_KEY", "sk-test");
    for (const std::string body : {std::string("not json"), std::string("{}"),
                                   std::string("{\"choices\":[]}"),
                                   std::string("{\"choices\":[{\"message\":{}}]}")}) {
        FakeTransport fake;
        fake.responses = {{200, body, ""}};
        HttpChatProvider provider(chat_config(), fake.transport(), fake.sleeper());
        try {
            provider.chat_complete(simple_request());
            FAIL("expected an error for body: ", body);
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::backend);
        }
    }
}

TEST_CASE("http embedding provider parses vectors and checks dimension") {
    EnvGuard key("FAMLENS_API_KEY", "sk-test");
    FakeTransport fake;
    json good = {{"data", {{{"embedding", {0.1, 0.2, 0.3}}}}}};
    fake.responses = {{200, good.dump(), ""}};
    HttpEmbeddingProvider provider(chat_config(), fake.transport(), fake.sleeper());

    const EmbeddingVector v = provider.embed_text("text");
    CHECK(v.dimension() == 3);
    CHECK(v.values[1] == doctest::Approx(0.2));
    REQUIRE(fake.seen.size() == 1);
    CHECK(fake.seen[0].url == "https://api.test.invalid/v1/embeddings");
    const json body = json::parse(fake.seen[0].body);
    CHECK(body["model"] == "test-embed");
    CHECK(body["input"] == "text");
}

TEST_CASE("http embedding provider rejects a wrong-dimension vector") {
    EnvGuard key("FAMLENS_API_KEY", "sk-test");
    FakeTransport fake;
    json bad = {{"data", {{{"embedding", {0.1, 0.2}}}}}};
    fake.responses = {{200, bad.dump(), ""}};
    HttpEmbeddingProvider provider(chat_config(), fake.transport(), fake.sleeper());
    CHECK_THROWS_AS(provider.embed_text("text"), Error);
}

TEST_CASE("base_url without a path still forms endpoint URLs") {
    EnvGuard key("FAMLENS_API_KEY", "sk-test");
    FakeTransport fake;
    fake.responses = {{200, chat_body("ok"), ""}};
    HttpProviderConfig cfg = chat_config();
    cfg.base_url = "http://localhost:8080";
    HttpChatProvider provider(cfg, fake.transport(), fake.sleeper());
    CHECK(provider.chat_complete(simple_request()) == "ok");
    CHECK(fake.seen[0].url == "http://localhost:8080/chat/completions");
}
