// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "famlens/agents.hpp"
#include "famlens/dialogue.hpp"
#include "famlens/experts.hpp"
#include "famlens/feedback.hpp"
#include "famlens/reports.hpp"

#include <string>
#include <utility>
#include <vector>

namespace famlens {

/// One logged model call. Step numbers follow the discussion protocol:
/// 1 drafts, 2 peer comments, 3 refinements, 4 integration.
struct CallLogEntry {
    int step = 0;
    std::string tag;
    std::string agent; // agent id, "from->to" for comments, "meta" for step 4
    std::string prompt_hash;
    std::string response_hash;

    bool operator==(const CallLogEntry&) const = default;
};

struct DiscussionTranscript {
    std::string scenario_id;
    ExpertPanel panel;
    std::vector<CallLogEntry> calls;

    bool operator==(const DiscussionTranscript&) const = default;
};

/// `step=<n> tag=<tag> agent=<agent> prompt=<hex16> response=<hex16>` lines.
std::string serialize_transcript_log(const DiscussionTranscript& t);

/// Step 1: every panel agent drafts audience-split feedback from the dialogue
/// and the combined report pair, role-playing its background document.
std::vector<FeedbackDraft> initial_drafts(const AgentContext& ctx, const ExpertPool& pool,
                                          const ExpertPanel& panel, const Dialogue& d,
                                          const SituationReport& r_child,
                                          const SituationReport& r_adult);

/// Step 2: one comment per ordered (reviewer, author) pair, 20 in all.
std::vector<PeerComment> peer_comments(const AgentContext& ctx, const ExpertPool& pool,
                                       const ExpertPanel& panel,
                                       const std::vector<FeedbackDraft>& drafts);

/// Step 3: each agent refines its own draft given exactly its four received
/// comments.
std::vector<FeedbackDraft> refine_drafts(const AgentContext& ctx, const ExpertPool& pool,
                                         const ExpertPanel& panel,
                                         const std::vector<FeedbackDraft>& drafts,
                                         const std::vector<PeerComment>& comments);

/// Step 4: one integration call over all five refined drafts, returning
/// (final_child, final_adult).
std::pair<std::string, std::string> integrate_final(const AgentContext& ctx,
                                                    const std::vector<FeedbackDraft>& refined);

struct DiscussionResult {
    FeedbackBundle bundle;
    DiscussionTranscript transcript;

    bool operator==(const DiscussionResult&) const = default;
};

/// Runs steps 1-4 in strict order; fan-out within steps 1-3 is concurrent up
/// to the cap, with transcript entries aggregated in enumeration order so the
/// result is schedule-independent. Without repairs this issues exactly
/// 5 + 20 + 5 + 1 = 31 chat calls.
DiscussionResult run_discussion(const AgentContext& ctx, const ExpertPool& pool,
                                const ExpertPanel& panel, const Dialogue& d,
                                const SituationReport& r_child, const SituationReport& r_adult);

} // namespace famlens
