// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

namespace famlens {

/// One expert's feedback draft. Round 0 is the initial draft, round 1 the
/// refinement after peer commentary. Drafts carry both audiences from the
/// start because the final output is audience-split.
struct FeedbackDraft {
    std::string agent_id;
    int round = 0; // 0 or 1
    std::string child_feedback;
    std::string adult_feedback;

    bool operator==(const FeedbackDraft&) const = default;
};

struct PeerComment {
    std::string from_agent;
    std::string to_agent; // the draft author
    std::string content;

    bool operator==(const PeerComment&) const = default;
};

/// The full artifact set of one discussion: 5 initial drafts, 20 peer
/// comments (4 received per agent, none self-addressed), 5 refined drafts,
/// and the integrated per-audience feedback.
struct FeedbackBundle {
    std::string scenario_id;
    std::vector<std::string> panel; // 5 agent ids
    std::vector<FeedbackDraft> initial_drafts;
    std::vector<PeerComment> comments;
    std::vector<FeedbackDraft> refined_drafts;
    std::string final_child;
    std::string final_adult;

    bool operator==(const FeedbackBundle&) const = default;
};

void validate_draft(const FeedbackDraft& d);
void validate_comment(const PeerComment& c);
void validate_feedback_bundle(const FeedbackBundle& b);

} // namespace famlens
