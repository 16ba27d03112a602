// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "famlens/backend.hpp"
#include "famlens/dialogue.hpp"
#include "famlens/prompts.hpp"
#include "famlens/reports.hpp"
#include "famlens/scripted.hpp"

#include <atomic>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

namespace famlens::test {

inline std::filesystem::path source_dir() { return std::filesystem::path(FAMLENS_SOURCE_DIR); }

inline std::filesystem::path prompts_en_dir() { return source_dir() / "assets" / "prompts" / "en"; }
inline std::filesystem::path pool_dir() { return source_dir() / "assets" / "pool"; }
inline std::filesystem::path scripted_dir() { return source_dir() / "fixtures" / "scripted"; }
inline std::filesystem::path metas_dir() { return source_dir() / "fixtures" / "metas"; }
inline std::filesystem::path eval_dir() { return source_dir() / "fixtures" / "eval"; }

/// Unique scratch directory removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& label) {
        static std::atomic<unsigned> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("famlens_" + label + "_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

/// Wraps a provider, counting calls and recording tags (thread-safe).
class RecordingChatProvider final : public ChatProvider {
public:
    explicit RecordingChatProvider(ChatProvider& inner) : inner_(inner) {}

    std::string chat_complete(const ChatRequest& req) override {
        {
            std::lock_guard<std::mutex> lock(mutex_);
            tags_.push_back(req.tag);
        }
        return inner_.chat_complete(req);
    }
    std::string provider_id() const override { return inner_.provider_id(); }

    std::size_t call_count() const {
        std::lock_guard<std::mutex> lock(mutex_);
        return tags_.size();
    }
    std::vector<std::string> tags() const {
        std::lock_guard<std::mutex> lock(mutex_);
        return tags_;
    }

private:
    ChatProvider& inner_;
    mutable std::mutex mutex_;
    std::vector<std::string> tags_;
};

/// Multiplies an inner provider's vectors by a positive constant; cosine
/// ranking must be invariant under it.
class ScaledEmbeddingProvider final : public EmbeddingProvider {
public:
    ScaledEmbeddingProvider(EmbeddingProvider& inner, double scale)
        : inner_(inner), scale_(scale) {}

    EmbeddingVector embed_text(std::string_view text) override {
        EmbeddingVector v = inner_.embed_text(text);
        for (auto& x : v.values) {
            x *= scale_;
        }
        return v;
    }
    std::size_t dimension() const override { return inner_.dimension(); }
    std::string provider_id() const override {
        return inner_.provider_id() + ":scaled";
    }

private:
    EmbeddingProvider& inner_;
    double scale_;
};

inline Dialogue make_dialogue(int turns, const std::string& id = "t01") {
    Dialogue d;
    d.scenario_id = id;
    for (int i = 1; i <= turns; ++i) {
        DialogueTurn turn;
        turn.index = i;
        turn.speaker = i % 2 == 1 ? Speaker::parent : Speaker::child;
        turn.content = (turn.speaker == Speaker::parent ? "parent line " : "child line ") +
                       std::to_string(i);
        d.turns.push_back(std::move(turn));
    }
    return d;
}

inline SuppressionReport make_suppression_report() {
    SuppressionReport r;
    r.s = 4;
    r.suppression_type = SuppressionCategory::anxiety;
    r.reason = "short deflecting answers under pressure";
    r.c = 0.85;
    return r;
}

inline AttributeReport make_attribute_report() {
    AttributeReport r;
    r.gender = Gender::male;
    r.age = 9;
    r.background = "a shy third grader";
    return r;
}

inline BiasReport make_bias_report() {
    BiasReport r;
    r.bias_description = "projects athletic excellence onto the child";
    r.c = 0.9;
    return r;
}

inline SituationReport make_child_report(const std::string& id = "t01") {
    SituationReport r;
    r.audience = Audience::child;
    r.scenario_id = id;
    r.summary = "the child hides worry about training intensity";
    r.source_detection = make_suppression_report();
    r.attributes = make_attribute_report();
    return r;
}

inline SituationReport make_adult_report(const std::string& id = "t01") {
    SituationReport r;
    r.audience = Audience::adult;
    r.scenario_id = id;
    r.summary = "the parent steers every topic toward more training";
    r.source_detection = make_bias_report();
    r.attributes = make_attribute_report();
    return r;
}

} // namespace famlens::test
