// SPDX-License-Identifier: Apache-2.0
#include "famlens/config.hpp"

#include "famlens/error.hpp"
#include "famlens/fsio.hpp"

#include <nlohmann/json.hpp>

#include <set>

namespace famlens {

namespace {

using nlohmann::json;

std::string get_string(const json& doc, const char* key, const std::string& fallback) {
    if (!doc.contains(key)) {
        return fallback;
    }
    if (!doc[key].is_string()) {
        throw Error::config(std::string("config key '") + key + "' must be a string");
    }
    return doc[key].get<std::string>();
}

std::filesystem::path get_path(const json& doc, const char* key,
                               const std::filesystem::path& base_dir) {
    const std::string value = get_string(doc, key, "");
    if (value.empty()) {
        return {};
    }
    const std::filesystem::path p(value);
    return p.is_absolute() ? p : base_dir / p;
}

long get_integer(const json& doc, const char* key, long fallback) {
    if (!doc.contains(key)) {
        return fallback;
    }
    if (!doc[key].is_number_integer()) {
        throw Error::config(std::string("config key '") + key + "' must be an integer");
    }
    return doc[key].get<long>();
}

} // namespace

void validate_run_config(const RunConfig& cfg) {
    if (cfg.backend == RunConfig::Backend::http) {
        if (cfg.base_url.empty()) {
            throw Error::config("http backend requires config key 'base_url'");
        }
        if (cfg.model_name.empty()) {
            throw Error::config("http backend requires config key 'model_name'");
        }
        if (cfg.api_key_env.empty()) {
            throw Error::config("http backend requires a non-empty 'api_key_env'");
        }
    } else {
        if (cfg.fixtures_dir.empty()) {
            throw Error::config("scripted backend requires config key 'fixtures_dir'");
        }
    }
    if (cfg.embedding == RunConfig::EmbeddingMode::remote) {
        if (cfg.backend != RunConfig::Backend::http) {
            throw Error::config("embedding 'remote' requires backend 'http'");
        }
        if (cfg.embedding_model.empty()) {
            throw Error::config("embedding 'remote' requires config key 'embedding_model'");
        }
    }
    if (cfg.embedding_dimension == 0) {
        throw Error::config("embedding_dimension must be positive");
    }
    if (cfg.concurrency_cap == 0) {
        throw Error::config("concurrency_cap must be at least 1");
    }
    if (cfg.prompt_template_dir.empty()) {
        throw Error::config("config key 'prompt_template_dir' is required");
    }
    if (cfg.pool_dir.empty()) {
        throw Error::config("config key 'pool_dir' is required");
    }
    if (cfg.temperature && *cfg.temperature < 0.0) {
        throw Error::config("temperature must be non-negative");
    }
    if (cfg.max_repairs < 0) {
        throw Error::config("max_repairs must be non-negative");
    }
    if (cfg.turn_count < 2) {
        throw Error::config("turn_count must be at least 2");
    }
    if (cfg.language_tag.empty()) {
        throw Error::config("language_tag must be non-empty");
    }
}

RunConfig parse_run_config(std::string_view bytes, const std::filesystem::path& base_dir) {
    json doc = json::parse(bytes, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        throw Error::config("config file is not a JSON object");
    }

    static const std::set<std::string> known = {
        "backend",        "base_url",          "model_name",     "embedding_model",
        "api_key_env",    "fixtures_dir",      "embedding",      "embedding_dimension",
        "concurrency_cap", "prompt_template_dir", "pool_dir",    "pair_embedding",
        "temperature",    "max_repairs",       "language_tag",   "turn_count",
        "stop_conditions"};
    for (const auto& [key, value] : doc.items()) {
        if (known.count(key) == 0) {
            throw Error::config("unknown config key '" + key + "'");
        }
    }

    RunConfig cfg;
    const std::string backend = get_string(doc, "backend", "");
    if (backend == "http") {
        cfg.backend = RunConfig::Backend::http;
    } else if (backend == "scripted") {
        cfg.backend = RunConfig::Backend::scripted;
    } else {
        throw Error::config("config key 'backend' must be 'http' or 'scripted'");
    }

    cfg.base_url = get_string(doc, "base_url", "");
    cfg.model_name = get_string(doc, "model_name", "");
    cfg.embedding_model = get_string(doc, "embedding_model", "");
    cfg.api_key_env = get_string(doc, "api_key_env", "FAMLENS_API_KEY");
    cfg.fixtures_dir = get_path(doc, "fixtures_dir", base_dir);

    const std::string embedding = get_string(
        doc, "embedding", cfg.backend == RunConfig::Backend::http ? "remote" : "deterministic");
    if (embedding == "remote") {
        cfg.embedding = RunConfig::EmbeddingMode::remote;
    } else if (embedding == "deterministic") {
        cfg.embedding = RunConfig::EmbeddingMode::deterministic;
    } else {
        throw Error::config("config key 'embedding' must be 'remote' or 'deterministic'");
    }

    const long dimension = get_integer(doc, "embedding_dimension", 768);
    if (dimension < 1) {
        throw Error::config("embedding_dimension must be positive");
    }
    cfg.embedding_dimension = static_cast<std::size_t>(dimension);

    const long cap = get_integer(doc, "concurrency_cap", 4);
    if (cap < 1) {
        throw Error::config("concurrency_cap must be at least 1");
    }
    cfg.concurrency_cap = static_cast<std::size_t>(cap);

    cfg.prompt_template_dir = get_path(doc, "prompt_template_dir", base_dir);
    cfg.pool_dir = get_path(doc, "pool_dir", base_dir);
    cfg.pair_embedding = parse_pair_embedding(get_string(doc, "pair_embedding", "concat"));

    if (doc.contains("temperature")) {
        if (!doc["temperature"].is_number()) {
            throw Error::config("config key 'temperature' must be a number");
        }
        cfg.temperature = doc["temperature"].get<double>();
    }

    cfg.max_repairs = static_cast<int>(get_integer(doc, "max_repairs", 2));
    cfg.language_tag = get_string(doc, "language_tag", "ja");
    cfg.turn_count = static_cast<int>(get_integer(doc, "turn_count", 10));
    cfg.stop_conditions =
        get_string(doc, "stop_conditions", "Stop when the exchange reaches a natural pause.");

    validate_run_config(cfg);
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    const std::string bytes = read_text_file(path);
    const std::filesystem::path base =
        path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
    return parse_run_config(bytes, base);
}

} // namespace famlens
