// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "famlens/experts.hpp"

#include <filesystem>
#include <optional>
#include <string>

namespace famlens {

/// Run configuration loaded from a JSON file. Relative paths are resolved
/// against the config file's directory. Secrets never live here: http mode
/// names an environment variable instead.
struct RunConfig {
    enum class Backend { http, scripted };
    enum class EmbeddingMode { remote, deterministic };

    Backend backend = Backend::scripted;

    // http mode
    std::string base_url;
    std::string model_name;
    std::string embedding_model;
    std::string api_key_env = "FAMLENS_API_KEY";

    // scripted mode
    std::filesystem::path fixtures_dir;

    EmbeddingMode embedding = EmbeddingMode::deterministic;
    std::size_t embedding_dimension = 768;
    std::size_t concurrency_cap = 4;
    std::filesystem::path prompt_template_dir;
    std::filesystem::path pool_dir;
    PairEmbedding pair_embedding = PairEmbedding::concat;
    std::optional<double> temperature;
    int max_repairs = 2;

    // corpus generation defaults
    std::string language_tag = "ja";
    int turn_count = 10;
    std::string stop_conditions = "Stop when the exchange reaches a natural pause.";
};

void validate_run_config(const RunConfig& cfg);

RunConfig parse_run_config(std::string_view bytes, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);

} // namespace famlens
