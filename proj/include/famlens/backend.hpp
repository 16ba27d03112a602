// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <condition_variable>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace famlens {

struct ChatMessage {
    enum class Role { system, user, assistant };
    Role role = Role::user;
    std::string content;
};

std::string_view to_string(ChatMessage::Role r);

/// One chat-completion request. `tag` labels the pipeline stage and drives
/// scripted-fixture lookup and transcript logging.
struct ChatRequest {
    std::string system_prompt;
    std::vector<ChatMessage> messages;
    double temperature = 1.0;
    std::optional<int> max_output_tokens;
    std::string tag;
};

void validate_request(const ChatRequest& req);

/// Providers must be safe to call from multiple threads concurrently.
class ChatProvider {
public:
    virtual ~ChatProvider() = default;
    virtual std::string chat_complete(const ChatRequest& req) = 0;
    virtual std::string provider_id() const = 0;
};

/// Validates the request, dispatches, and rejects empty completions.
std::string chat_complete(ChatProvider& provider, const ChatRequest& req);

struct EmbeddingVector {
    std::vector<double> values;

    std::size_t dimension() const { return values.size(); }
};

void validate_embedding(const EmbeddingVector& v, std::size_t expected_dimension);

class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    virtual EmbeddingVector embed_text(std::string_view text) = 0;
    virtual std::size_t dimension() const = 0;
    virtual std::string provider_id() const = 0;
};

/// Rejects empty input, dispatches, and checks dimension and finiteness.
EmbeddingVector embed_text(EmbeddingProvider& provider, std::string_view text);

/// dot(u,v) / (|u| |v|). Throws on dimension mismatch or a zero-norm vector.
double cosine_similarity(const EmbeddingVector& u, const EmbeddingVector& v);

// -- hashing ----------------------------------------------------------------

std::uint64_t fnv1a64(std::string_view bytes);
std::uint64_t splitmix64(std::uint64_t x);
std::string hex16(std::uint64_t value);

/// Stable hash of the rendered prompt (system prompt plus messages). Keys
/// scripted fixtures and transcript log lines.
std::string prompt_hash(const ChatRequest& req);
std::string response_hash(std::string_view response);

// -- concurrency ------------------------------------------------------------

/// Counting semaphore with a runtime-configured capacity.
class Semaphore {
public:
    explicit Semaphore(std::size_t count);
    void acquire();
    void release();

private:
    std::mutex mutex_;
    std::condition_variable cv_;
    std::size_t count_;
};

class SemaphoreGuard {
public:
    explicit SemaphoreGuard(Semaphore& sem) : sem_(sem) { sem_.acquire(); }
    ~SemaphoreGuard() { sem_.release(); }
    SemaphoreGuard(const SemaphoreGuard&) = delete;
    SemaphoreGuard& operator=(const SemaphoreGuard&) = delete;

private:
    Semaphore& sem_;
};

/// Runs body(0..count-1) on up to `cap` worker threads. Results must be
/// written into index-addressed slots by the body; if several invocations
/// throw, the exception with the lowest index is rethrown, so the outcome is
/// independent of scheduling.
void parallel_for(std::size_t count, std::size_t cap, const std::function<void(std::size_t)>& body);

/// Caps the number of in-flight chat calls across all threads.
class ThrottledChatProvider final : public ChatProvider {
public:
    ThrottledChatProvider(std::unique_ptr<ChatProvider> inner, std::size_t cap)
        : inner_(std::move(inner)), sem_(cap) {}

    std::string chat_complete(const ChatRequest& req) override {
        SemaphoreGuard guard(sem_);
        return inner_->chat_complete(req);
    }
    std::string provider_id() const override { return inner_->provider_id(); }

private:
    std::unique_ptr<ChatProvider> inner_;
    Semaphore sem_;
};

class ThrottledEmbeddingProvider final : public EmbeddingProvider {
public:
    ThrottledEmbeddingProvider(std::unique_ptr<EmbeddingProvider> inner, std::size_t cap)
        : inner_(std::move(inner)), sem_(cap) {}

    EmbeddingVector embed_text(std::string_view text) override {
        SemaphoreGuard guard(sem_);
        return inner_->embed_text(text);
    }
    std::size_t dimension() const override { return inner_->dimension(); }
    std::string provider_id() const override { return inner_->provider_id(); }

private:
    std::unique_ptr<EmbeddingProvider> inner_;
    Semaphore sem_;
};

} // namespace famlens
