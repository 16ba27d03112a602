// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "famlens/backend.hpp"

#include <filesystem>
#include <functional>
#include <map>
#include <string>

namespace famlens {

/// Deterministic fixture-driven chat provider. Responses key on
/// (tag, prompt hash) via files named `<tag>.<hash16>.txt`, with a
/// tag-only fallback file `<tag>.txt` for coarse fixtures. Immutable after
/// load, so concurrent calls are safe and the whole pipeline becomes a pure
/// function of (inputs, fixture set).
class ScriptedChatProvider final : public ChatProvider {
public:
    explicit ScriptedChatProvider(const std::filesystem::path& fixtures_dir);

    /// Test constructor: keys are either "tag" or "tag.<hash16>".
    static ScriptedChatProvider from_map(std::map<std::string, std::string> fixtures);

    std::string chat_complete(const ChatRequest& req) override;
    std::string provider_id() const override { return "scripted:" + origin_; }

private:
    ScriptedChatProvider() = default;

    std::map<std::string, std::string> fixtures_;
    std::string origin_;
};

/// Pure-function provider for unit tests: the response is computed from the
/// request alone, so determinism is preserved.
class CallbackChatProvider final : public ChatProvider {
public:
    explicit CallbackChatProvider(std::function<std::string(const ChatRequest&)> fn)
        : fn_(std::move(fn)) {}

    std::string chat_complete(const ChatRequest& req) override { return fn_(req); }
    std::string provider_id() const override { return "callback"; }

private:
    std::function<std::string(const ChatRequest&)> fn_;
};

/// Deterministic embedding provider: a seeded, hash-derived unit vector.
/// The same text always maps to the same vector; distinct texts collide only
/// with negligible probability.
class HashEmbeddingProvider final : public EmbeddingProvider {
public:
    explicit HashEmbeddingProvider(std::size_t dimension = 768, std::uint64_t seed = 0)
        : dimension_(dimension), seed_(seed) {}

    EmbeddingVector embed_text(std::string_view text) override;
    std::size_t dimension() const override { return dimension_; }
    std::string provider_id() const override {
        return "hash:" + std::to_string(dimension_) + ":" + std::to_string(seed_);
    }

private:
    std::size_t dimension_;
    std::uint64_t seed_;
};

} // namespace famlens
