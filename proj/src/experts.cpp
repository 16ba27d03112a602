// SPDX-License-Identifier: Apache-2.0
#include "famlens/experts.hpp"

#include "famlens/csv.hpp"
#include "famlens/error.hpp"
#include "famlens/structured.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace famlens {

namespace {

using nlohmann::json;

constexpr std::size_t kDomainFieldCount = 8;
constexpr std::size_t kAgentsPerField = 5;
constexpr std::size_t kStanceAgentCount = 10;
constexpr std::size_t kShippedPoolSize = 50;

ExpertProfile parse_profile(const json& doc, const std::string& origin) {
    if (!doc.is_object()) {
        throw Error::config("expert profile is not a JSON object: " + origin);
    }
    ExpertProfile profile;
    for (const char* key : {"id", "name", "axis", "field", "background"}) {
        if (!doc.contains(key) || !doc[key].is_string() || doc[key].get<std::string>().empty()) {
            throw Error::config("expert profile field '" + std::string(key) +
                                "' must be non-empty text: " + origin);
        }
    }
    profile.id = doc["id"].get<std::string>();
    profile.name = doc["name"].get<std::string>();
    profile.axis = parse_expert_axis(doc["axis"].get<std::string>());
    profile.field = doc["field"].get<std::string>();
    profile.background_doc = doc["background"].get<std::string>();
    return profile;
}

std::string format_similarity(double value) {
    std::ostringstream out;
    out.setf(std::ios::fixed);
    out.precision(6);
    out << value;
    return out.str();
}

struct PanelPicks {
    std::vector<std::string> ids;
    std::string rationale;
};

PanelPicks parse_picks_reply(const std::string& raw) {
    const std::string body = extract_json_object(raw);
    json parsed = json::parse(body, nullptr, false);
    if (parsed.is_discarded() || !parsed.is_object()) {
        throw OutputViolation("reply is not a parseable JSON object");
    }
    if (!parsed.contains("picks") || !parsed["picks"].is_array() || parsed["picks"].size() != 2) {
        throw OutputViolation("field 'picks' must be an array of exactly two agent ids");
    }
    PanelPicks picks;
    for (const auto& entry : parsed["picks"]) {
        if (!entry.is_string() || entry.get<std::string>().empty()) {
            throw OutputViolation("every pick must be a non-empty agent id");
        }
        picks.ids.push_back(entry.get<std::string>());
    }
    if (!parsed.contains("rationale") || !parsed["rationale"].is_string() ||
        parsed["rationale"].get<std::string>().empty()) {
        throw OutputViolation("field 'rationale' must be non-empty text");
    }
    picks.rationale = parsed["rationale"].get<std::string>();
    return picks;
}

} // namespace

std::string_view to_string(ExpertAxis a) {
    switch (a) {
    case ExpertAxis::domain_expertise:
        return "domain_expertise";
    case ExpertAxis::perspective_stance:
        return "perspective_stance";
    }
    return "domain_expertise";
}

ExpertAxis parse_expert_axis(std::string_view s) {
    if (s == "domain_expertise") {
        return ExpertAxis::domain_expertise;
    }
    if (s == "perspective_stance") {
        return ExpertAxis::perspective_stance;
    }
    throw Error::validation("unknown expert axis: " + std::string(s));
}

const ExpertProfile& ExpertPool::by_id(const std::string& agent_id) const {
    const auto it = std::find_if(profiles.begin(), profiles.end(),
                                 [&](const ExpertProfile& p) { return p.id == agent_id; });
    if (it == profiles.end()) {
        throw Error::validation("no expert with id '" + agent_id + "' in the pool");
    }
    return *it;
}

void validate_pool(const ExpertPool& pool, bool strict) {
    std::set<std::string> ids;
    for (const auto& profile : pool.profiles) {
        if (profile.id.empty() || profile.background_doc.empty()) {
            throw Error::validation("expert profiles need non-empty id and background");
        }
        if (!ids.insert(profile.id).second) {
            throw Error::validation("duplicate expert id '" + profile.id + "'");
        }
    }
    if (!strict) {
        if (pool.profiles.size() < 5) {
            throw Error::validation("expert pool needs at least five members, got " +
                                    std::to_string(pool.profiles.size()));
        }
        return;
    }
    if (pool.profiles.size() != kShippedPoolSize) {
        throw Error::validation("expert pool must have exactly 50 members, got " +
                                std::to_string(pool.profiles.size()));
    }
    std::map<std::string, std::size_t> field_counts;
    std::size_t stance_count = 0;
    for (const auto& profile : pool.profiles) {
        if (profile.axis == ExpertAxis::domain_expertise) {
            ++field_counts[profile.field];
        } else {
            ++stance_count;
        }
    }
    if (stance_count != kStanceAgentCount) {
        throw Error::validation("expert pool must have exactly 10 perspective agents, got " +
                                std::to_string(stance_count));
    }
    if (field_counts.size() != kDomainFieldCount) {
        throw Error::validation("domain agents must cover exactly 8 fields, got " +
                                std::to_string(field_counts.size()));
    }
    for (const auto& [field, count] : field_counts) {
        if (count != kAgentsPerField) {
            throw Error::validation("field '" + field + "' must have exactly 5 agents, got " +
                                    std::to_string(count));
        }
    }
}

ExpertPool load_pool(const std::filesystem::path& dir, bool strict) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) {
        throw Error::config("expert pool directory not found: " + dir.string());
    }
    ExpertPool pool;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".json") {
            continue;
        }
        std::ifstream in(entry.path(), std::ios::binary);
        if (!in) {
            throw Error::config("cannot open expert profile: " + entry.path().string());
        }
        json doc = json::parse(in, nullptr, false);
        if (doc.is_discarded()) {
            throw Error::config("expert profile is not valid JSON: " + entry.path().string());
        }
        pool.profiles.push_back(parse_profile(doc, entry.path().string()));
    }
    std::sort(pool.profiles.begin(), pool.profiles.end(),
              [](const ExpertProfile& a, const ExpertProfile& b) { return a.id < b.id; });
    validate_pool(pool, strict);
    return pool;
}

std::size_t lower_half_begin_rank(std::size_t pool_size) {
    return (pool_size + 1) / 2 + 1;
}

PairEmbedding parse_pair_embedding(std::string_view s) {
    if (s == "concat") {
        return PairEmbedding::concat;
    }
    if (s == "mean") {
        return PairEmbedding::mean;
    }
    throw Error::config("pair_embedding must be 'concat' or 'mean', got '" + std::string(s) + "'");
}

EmbeddingVector PoolEmbeddingCache::get_or_compute(EmbeddingProvider& provider,
                                                   const std::string& doc) {
    const std::string key = provider.provider_id() + "\x1e" + hex16(fnv1a64(doc));
    {
        std::lock_guard<std::mutex> lock(mutex_);
        if (const auto it = cache_.find(key); it != cache_.end()) {
            return it->second;
        }
    }
    EmbeddingVector vec = embed_text(provider, doc);
    std::lock_guard<std::mutex> lock(mutex_);
    return cache_.emplace(key, std::move(vec)).first->second;
}

RankedPool rank_pool(const ExpertPool& pool, EmbeddingProvider& embeddings,
                     const SituationReport& r_child, const SituationReport& r_adult,
                     PairEmbedding mode, std::size_t cap, PoolEmbeddingCache* cache) {
    validate_pool(pool, false);
    validate_report(r_child);
    validate_report(r_adult);
    if (r_child.audience != Audience::child || r_adult.audience != Audience::adult) {
        throw Error::validation("rank_pool needs one child report and one adult report");
    }

    EmbeddingVector pair_vec;
    if (mode == PairEmbedding::concat) {
        pair_vec = embed_text(embeddings, render_report_pair_text(r_child, r_adult));
    } else {
        const EmbeddingVector child_vec = embed_text(embeddings, render_report_text(r_child));
        const EmbeddingVector adult_vec = embed_text(embeddings, render_report_text(r_adult));
        pair_vec.values.resize(child_vec.values.size());
        for (std::size_t i = 0; i < pair_vec.values.size(); ++i) {
            pair_vec.values[i] = (child_vec.values[i] + adult_vec.values[i]) / 2.0;
        }
    }

    std::vector<EmbeddingVector> docs(pool.profiles.size());
    parallel_for(pool.profiles.size(), cap, [&](std::size_t i) {
        const std::string& doc = pool.profiles[i].background_doc;
        docs[i] = cache ? cache->get_or_compute(embeddings, doc) : embed_text(embeddings, doc);
    });

    RankedPool ranked;
    ranked.entries.reserve(pool.profiles.size());
    for (std::size_t i = 0; i < pool.profiles.size(); ++i) {
        ranked.entries.push_back({pool.profiles[i].id, cosine_similarity(docs[i], pair_vec)});
    }
    std::sort(ranked.entries.begin(), ranked.entries.end(),
              [](const RankedEntry& a, const RankedEntry& b) {
                  if (a.similarity != b.similarity) {
                      return a.similarity > b.similarity;
                  }
                  return a.agent_id < b.agent_id;
              });
    return ranked;
}

std::vector<std::string> ExpertPanel::members() const {
    std::vector<std::string> ids(top_three.begin(), top_three.end());
    ids.insert(ids.end(), diversity_picks.begin(), diversity_picks.end());
    return ids;
}

void validate_panel(const ExpertPanel& panel, const RankedPool& ranked) {
    const auto ids = panel.members();
    if (std::set<std::string>(ids.begin(), ids.end()).size() != 5) {
        throw Error::validation("expert panel must have five distinct members");
    }
    std::map<std::string, std::size_t> rank_of;
    for (std::size_t i = 0; i < ranked.entries.size(); ++i) {
        rank_of[ranked.entries[i].agent_id] = i + 1;
    }
    for (std::size_t i = 0; i < 3; ++i) {
        const auto it = rank_of.find(panel.top_three[i]);
        if (it == rank_of.end() || it->second != i + 1) {
            throw Error::validation("panel top three must be exactly ranks 1-3 of the ranking");
        }
    }
    const std::size_t lower_begin = lower_half_begin_rank(ranked.entries.size());
    for (const auto& pick : panel.diversity_picks) {
        const auto it = rank_of.find(pick);
        if (it == rank_of.end()) {
            throw Error::validation("diversity pick '" + pick + "' is not in the ranking");
        }
        if (it->second < lower_begin) {
            throw Error::validation("diversity pick '" + pick +
                                    "' is not in the lower half of the ranking");
        }
    }
    if (panel.rationale.empty()) {
        throw Error::validation("panel rationale must be non-empty");
    }
}

ExpertPanel select_panel(const AgentContext& ctx, const ExpertPool& pool, const RankedPool& ranked,
                         const SituationReport& r_child, const SituationReport& r_adult) {
    if (ranked.entries.size() != pool.profiles.size()) {
        throw Error::validation("ranking does not cover the pool");
    }
    if (ranked.entries.size() < 5) {
        throw Error::validation("ranking needs at least five entries");
    }
    const std::size_t lower_begin = lower_half_begin_rank(ranked.entries.size());

    ExpertPanel panel;
    for (std::size_t i = 0; i < 3; ++i) {
        panel.top_three[i] = ranked.entries[i].agent_id;
    }

    std::ostringstream top_block;
    for (std::size_t i = 0; i < 3; ++i) {
        const ExpertProfile& profile = pool.by_id(ranked.entries[i].agent_id);
        top_block << "rank " << (i + 1) << ": " << profile.id << " (" << profile.name << ", "
                  << profile.field << ")\n"
                  << profile.background_doc << "\n";
    }

    std::set<std::string> candidate_ids;
    std::ostringstream candidate_block;
    for (std::size_t rank = lower_begin; rank <= ranked.entries.size(); ++rank) {
        const ExpertProfile& profile = pool.by_id(ranked.entries[rank - 1].agent_id);
        candidate_ids.insert(profile.id);
        candidate_block << "rank " << rank << ": " << profile.id << " (" << profile.name << ", "
                        << profile.field << ")\n"
                        << profile.background_doc << "\n";
    }

    ChatRequest req = ctx.prompts.make_request("select_panel",
                                               {{"reports", render_report_pair_text(r_child, r_adult)},
                                                {"top_three", top_block.str()},
                                                {"candidates", candidate_block.str()}});

    const auto validate_picks = [&](const PanelPicks& picks) {
        if (picks.ids[0] == picks.ids[1]) {
            throw OutputViolation("the two picks must be distinct agents");
        }
        for (const auto& id : picks.ids) {
            if (candidate_ids.count(id) == 0) {
                throw OutputViolation("pick '" + id + "' is not one of the listed candidates");
            }
        }
    };

    // One repair re-ask, then the deterministic fallback. Backend failures
    // propagate out of chat_complete untouched.
    bool picked = false;
    for (int attempt = 0; attempt <= 1 && !picked; ++attempt) {
        const std::string raw = chat_complete(ctx.chat, req);
        try {
            PanelPicks picks = parse_picks_reply(raw);
            validate_picks(picks);
            panel.diversity_picks = {picks.ids[0], picks.ids[1]};
            panel.rationale = picks.rationale;
            picked = true;
        } catch (const OutputViolation& violation) {
            req.messages.push_back({ChatMessage::Role::assistant, raw});
            req.messages.push_back(
                {ChatMessage::Role::user,
                 std::string("Your previous reply was invalid: ") + violation.what() +
                     ". Reply again with only the corrected JSON object and no other text."});
        }
    }
    if (!picked) {
        const std::size_t n = ranked.entries.size();
        panel.diversity_picks = {ranked.entries[n - 2].agent_id, ranked.entries[n - 1].agent_id};
        panel.rationale = "fallback: the two lowest-similarity agents";
    }
    validate_panel(panel, ranked);
    return panel;
}

std::string serialize_ranking_csv(const RankedPool& ranked) {
    std::string out = "rank,agent_id,similarity\n";
    for (std::size_t i = 0; i < ranked.entries.size(); ++i) {
        out += csv::write_row({std::to_string(i + 1), ranked.entries[i].agent_id,
                               format_similarity(ranked.entries[i].similarity)});
    }
    return out;
}

} // namespace famlens
