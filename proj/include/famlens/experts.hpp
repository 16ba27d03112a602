// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "famlens/agents.hpp"
#include "famlens/reports.hpp"

#include <array>
#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <vector>

namespace famlens {

enum class ExpertAxis { domain_expertise, perspective_stance };
std::string_view to_string(ExpertAxis a);
ExpertAxis parse_expert_axis(std::string_view s);

struct ExpertProfile {
    std::string id;
    std::string name;
    ExpertAxis axis = ExpertAxis::domain_expertise;
    std::string field; // specialty for domain agents, stance label otherwise
    std::string background_doc;

    bool operator==(const ExpertProfile&) const = default;
};

/// The role-playing expert pool, profiles sorted by id. The shipped pool has
/// 50 members: 40 domain agents (8 fields, 5 each) plus 10 stance agents.
struct ExpertPool {
    std::vector<ExpertProfile> profiles;

    const ExpertProfile& by_id(const std::string& agent_id) const;
};

/// Checks unique ids and non-empty documents; with strict also the exact
/// 50 = 8x5 + 10 shipped structure. Non-strict pools still need at least
/// five members so a panel exists.
void validate_pool(const ExpertPool& pool, bool strict);

/// Loads one profile document per `*.json` file in the directory.
ExpertPool load_pool(const std::filesystem::path& dir, bool strict = true);

struct RankedEntry {
    std::string agent_id;
    double similarity = 0.0;

    bool operator==(const RankedEntry&) const = default;
};

/// Similarity ranking over the whole pool: descending similarity, ties broken
/// by ascending agent_id, so the order is total and deterministic.
struct RankedPool {
    std::vector<RankedEntry> entries;
};

/// First rank (1-based) of the lower half: ceil(n/2) + 1. Ranks 26..50 for
/// the 50-agent pool.
std::size_t lower_half_begin_rank(std::size_t pool_size);

enum class PairEmbedding { concat, mean };
PairEmbedding parse_pair_embedding(std::string_view s);

/// Memoizes profile-document embeddings keyed by (provider id, doc hash);
/// the pool is static per run, so each document is embedded once.
class PoolEmbeddingCache {
public:
    EmbeddingVector get_or_compute(EmbeddingProvider& provider, const std::string& doc);

private:
    std::mutex mutex_;
    std::map<std::string, EmbeddingVector> cache_;
};

/// Embeds the report pair and every background document, then sorts by cosine
/// similarity. Embedding calls run concurrently up to `cap`.
RankedPool rank_pool(const ExpertPool& pool, EmbeddingProvider& embeddings,
                     const SituationReport& r_child, const SituationReport& r_adult,
                     PairEmbedding mode, std::size_t cap, PoolEmbeddingCache* cache = nullptr);

struct ExpertPanel {
    std::array<std::string, 3> top_three;
    std::array<std::string, 2> diversity_picks;
    std::string rationale;

    /// All five members, top three first.
    std::vector<std::string> members() const;

    bool operator==(const ExpertPanel&) const = default;
};

void validate_panel(const ExpertPanel& panel, const RankedPool& ranked);

/// Top three ranks plus two LLM-chosen diversity picks from the lower half.
/// Invalid picks get one repair re-ask, then fall back to the two
/// lowest-similarity agents; backend failures propagate.
ExpertPanel select_panel(const AgentContext& ctx, const ExpertPool& pool, const RankedPool& ranked,
                         const SituationReport& r_child, const SituationReport& r_adult);

/// Ranking dump rows: `rank,agent_id,similarity`.
std::string serialize_ranking_csv(const RankedPool& ranked);

} // namespace famlens
