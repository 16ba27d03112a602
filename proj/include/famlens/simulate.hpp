// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "famlens/agents.hpp"
#include "famlens/dialogue.hpp"
#include "famlens/error.hpp"
#include "famlens/scenario.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace famlens {

/// Run-level knobs for the role-play generation loop. Optional fields fall
/// back to scenario metadata (or, for post-feedback runs, to the original
/// dialogue's opening speaker).
struct GenerationConfig {
    int turn_count = 10; // >= 2
    std::optional<Speaker> starter;
    std::string stop_conditions = "Stop when the exchange reaches a natural pause.";
    std::optional<Topic> seed_topic;
    std::string language_tag = "ja";
};

void validate_generation_config(const GenerationConfig& cfg);

/// Turn-by-turn role play: parent and child agents alternate from the
/// starter, and a narrator agent may annotate each turn (a reply of "none"
/// attaches no note). A mid-generation failure names the turn.
Dialogue generate_scenario(const AgentContext& ctx, const ScenarioMetadata& meta,
                           const GenerationConfig& cfg);

struct CorpusEntry {
    std::string scenario_id;
    bool ok = false;
    int turn_count = 0;
    std::string detail; // error text when !ok
    std::optional<ErrorKind> error_kind;

    bool operator==(const CorpusEntry&) const = default;
};

/// `scenario_id,status,turn_count` rows in input order.
std::string serialize_corpus_manifest(const std::vector<CorpusEntry>& entries);

/// Generates every scenario into out_dir (`<id>.csv` + `<id>.meta`) and
/// writes `manifest.csv`. A failing scenario is recorded in the manifest and
/// leaves the others untouched.
std::vector<CorpusEntry> generate_corpus(const AgentContext& ctx,
                                         const std::vector<ScenarioMetadata>& metas,
                                         const GenerationConfig& cfg,
                                         const std::filesystem::path& out_dir);

/// Re-runs the role-play loop with the final feedback injected: the parent
/// agent sees final_adult, the child agent sees final_child, never the other
/// way around. The result carries the original id suffixed "-post".
Dialogue simulate_post_feedback(const AgentContext& ctx, const Dialogue& original,
                                const std::string& final_child, const std::string& final_adult,
                                const GenerationConfig& cfg);

} // namespace famlens
