// SPDX-License-Identifier: Apache-2.0
#include "famlens/backend.hpp"

#include "famlens/error.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <thread>

namespace famlens {

std::string_view to_string(ChatMessage::Role r) {
    switch (r) {
    case ChatMessage::Role::system: return "system";
    case ChatMessage::Role::user: return "user";
    case ChatMessage::Role::assistant: return "assistant";
    }
    return "?";
}

void validate_request(const ChatRequest& req) {
    if (req.messages.empty()) {
        throw Error::validation("chat request (" + req.tag + "): messages must not be empty");
    }
    if (!(req.temperature >= 0.0)) {
        throw Error::validation("chat request (" + req.tag + "): temperature must be >= 0");
    }
    if (req.max_output_tokens && *req.max_output_tokens < 1) {
        throw Error::validation("chat request (" + req.tag + "): max_output_tokens must be positive");
    }
}

std::string chat_complete(ChatProvider& provider, const ChatRequest& req) {
    validate_request(req);
    std::string reply = provider.chat_complete(req);
    if (reply.empty()) {
        throw Error::backend("provider returned empty text for tag \"" + req.tag + "\"");
    }
    return reply;
}

void validate_embedding(const EmbeddingVector& v, std::size_t expected_dimension) {
    if (v.dimension() != expected_dimension) {
        throw Error::validation("embedding: dimension " + std::to_string(v.dimension()) +
                                " does not match configured " + std::to_string(expected_dimension));
    }
    for (double x : v.values) {
        if (!std::isfinite(x)) {
            throw Error::validation("embedding: non-finite component");
        }
    }
}

EmbeddingVector embed_text(EmbeddingProvider& provider, std::string_view text) {
    if (text.empty()) {
        throw Error::validation("embed_text: input must not be empty");
    }
    EmbeddingVector v = provider.embed_text(text);
    validate_embedding(v, provider.dimension());
    return v;
}

double cosine_similarity(const EmbeddingVector& u, const EmbeddingVector& v) {
    if (u.dimension() != v.dimension()) {
        throw Error::validation("cosine_similarity: dimension mismatch " + std::to_string(u.dimension()) +
                                " vs " + std::to_string(v.dimension()));
    }
    double dot = 0.0, nu = 0.0, nv = 0.0;
    for (std::size_t i = 0; i < u.values.size(); ++i) {
        dot += u.values[i] * v.values[i];
        nu += u.values[i] * u.values[i];
        nv += v.values[i] * v.values[i];
    }
    if (nu == 0.0 || nv == 0.0) {
        throw Error::validation("cosine_similarity: zero-norm vector");
    }
    return dot / (std::sqrt(nu) * std::sqrt(nv));
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 1099511628211ULL;
    }
    return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
    std::uint64_t z = x + 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::string hex16(std::uint64_t value) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

std::string prompt_hash(const ChatRequest& req) {
    std::uint64_t h = 14695981039346656037ULL;
    auto mix = [&h](std::string_view part) {
        for (unsigned char b : part) {
            h ^= b;
            h *= 1099511628211ULL;
        }
        h ^= 0x1e;
        h *= 1099511628211ULL;
    };
    mix(req.system_prompt);
    for (const auto& m : req.messages) {
        mix(to_string(m.role));
        mix(m.content);
    }
    return hex16(h);
}

std::string response_hash(std::string_view response) {
    return hex16(fnv1a64(response));
}

Semaphore::Semaphore(std::size_t count) : count_(count == 0 ? 1 : count) {}

void Semaphore::acquire() {
    std::unique_lock lock(mutex_);
    cv_.wait(lock, [this] { return count_ > 0; });
    --count_;
}

void Semaphore::release() {
    {
        std::lock_guard lock(mutex_);
        ++count_;
    }
    cv_.notify_one();
}

void parallel_for(std::size_t count, std::size_t cap, const std::function<void(std::size_t)>& body) {
    if (count == 0) return;
    std::size_t workers = cap == 0 ? 1 : std::min(cap, count);
    std::vector<std::exception_ptr> errors(count);

    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            try {
                body(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    body(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        };
        std::vector<std::thread> threads;
        threads.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    }

    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

} // namespace famlens
