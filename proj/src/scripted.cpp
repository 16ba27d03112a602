// SPDX-License-Identifier: Apache-2.0
#include "famlens/scripted.hpp"

#include "famlens/error.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace famlens {

namespace {

std::string read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error::config("cannot open fixture file: " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string strip_trailing_whitespace(std::string text) {
    while (!text.empty() && (text.back() == '\n' || text.back() == '\r' ||
                             text.back() == ' ' || text.back() == '\t')) {
        text.pop_back();
    }
    return text;
}

} // namespace

ScriptedChatProvider::ScriptedChatProvider(const std::filesystem::path& fixtures_dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(fixtures_dir)) {
        throw Error::config("scripted fixtures directory not found: " + fixtures_dir.string());
    }
    origin_ = fixtures_dir.string();
    for (const auto& entry : fs::directory_iterator(fixtures_dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".txt") {
            continue;
        }
        // Key is the filename without extension: "tag" or "tag.<hash16>".
        const std::string key = entry.path().stem().string();
        fixtures_[key] = strip_trailing_whitespace(read_file_bytes(entry.path()));
    }
    if (fixtures_.empty()) {
        throw Error::config("no .txt fixtures in directory: " + fixtures_dir.string());
    }
}

ScriptedChatProvider ScriptedChatProvider::from_map(std::map<std::string, std::string> fixtures) {
    ScriptedChatProvider p;
    p.fixtures_ = std::move(fixtures);
    p.origin_ = "map";
    return p;
}

std::string ScriptedChatProvider::chat_complete(const ChatRequest& req) {
    validate_request(req);
    const std::string exact = req.tag + "." + prompt_hash(req);
    if (auto it = fixtures_.find(exact); it != fixtures_.end()) {
        return it->second;
    }
    if (auto it = fixtures_.find(req.tag); it != fixtures_.end()) {
        return it->second;
    }
    throw Error::backend("no scripted fixture for tag '" + req.tag + "' (looked for '" +
                         exact + ".txt' then '" + req.tag + ".txt')");
}

EmbeddingVector HashEmbeddingProvider::embed_text(std::string_view text) {
    if (dimension_ == 0) {
        throw Error::config("embedding dimension must be positive");
    }
    std::uint64_t state = fnv1a64(text) ^ seed_;
    EmbeddingVector vec;
    vec.values.resize(dimension_);
    double norm_sq = 0.0;
    for (std::size_t i = 0; i < dimension_; ++i) {
        state = splitmix64(state);
        const std::uint64_t bits = state;
        // Map to (-1, 1) uniformly from the top 53 bits.
        const double unit = static_cast<double>(bits >> 11) * (1.0 / 9007199254740992.0);
        const double v = unit * 2.0 - 1.0;
        vec.values[i] = v;
        norm_sq += v * v;
    }
    const double norm = std::sqrt(norm_sq);
    // A zero norm would need every component to be exactly zero; treat it as
    // a logic error guard rather than a reachable branch.
    if (norm == 0.0) {
        throw Error::backend("degenerate embedding for input text");
    }
    for (auto& v : vec.values) {
        v /= norm;
    }
    return vec;
}

} // namespace famlens
