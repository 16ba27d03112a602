// SPDX-License-Identifier: Apache-2.0
#include "famlens/feedback.hpp"

#include "famlens/error.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace famlens {

void validate_draft(const FeedbackDraft& d) {
    if (d.agent_id.empty()) {
        throw Error::validation("feedback draft: agent_id must not be empty");
    }
    if (d.round != 0 && d.round != 1) {
        throw Error::validation("feedback draft: round must be 0 or 1, got " + std::to_string(d.round));
    }
    if (d.child_feedback.empty() || d.adult_feedback.empty()) {
        throw Error::validation("feedback draft by " + d.agent_id +
                                ": both child and adult sections must be non-empty");
    }
}

void validate_comment(const PeerComment& c) {
    if (c.from_agent.empty() || c.to_agent.empty()) {
        throw Error::validation("peer comment: agent ids must not be empty");
    }
    if (c.from_agent == c.to_agent) {
        throw Error::validation("peer comment: self-addressed comment by " + c.from_agent);
    }
    if (c.content.empty()) {
        throw Error::validation("peer comment " + c.from_agent + "->" + c.to_agent + ": empty content");
    }
}

void validate_feedback_bundle(const FeedbackBundle& b) {
    if (b.panel.size() != 5) {
        throw Error::validation("feedback bundle: panel must have 5 members, got " +
                                std::to_string(b.panel.size()));
    }
    std::set<std::string> members(b.panel.begin(), b.panel.end());
    if (members.size() != 5) {
        throw Error::validation("feedback bundle: panel members must be distinct");
    }

    auto check_drafts = [&](const std::vector<FeedbackDraft>& drafts, int round, const char* what) {
        if (drafts.size() != 5) {
            throw Error::validation(std::string("feedback bundle: expected 5 ") + what + " drafts, got " +
                                    std::to_string(drafts.size()));
        }
        std::set<std::string> authors;
        for (const auto& d : drafts) {
            validate_draft(d);
            if (d.round != round) {
                throw Error::validation(std::string("feedback bundle: ") + what + " draft by " +
                                        d.agent_id + " has round " + std::to_string(d.round));
            }
            if (!members.count(d.agent_id)) {
                throw Error::validation(std::string("feedback bundle: ") + what + " draft by non-panel agent " +
                                        d.agent_id);
            }
            authors.insert(d.agent_id);
        }
        if (authors.size() != 5) {
            throw Error::validation(std::string("feedback bundle: ") + what +
                                    " drafts must cover every panel member exactly once");
        }
    };
    check_drafts(b.initial_drafts, 0, "initial");
    check_drafts(b.refined_drafts, 1, "refined");

    if (b.comments.size() != 20) {
        throw Error::validation("feedback bundle: expected 20 peer comments, got " +
                                std::to_string(b.comments.size()));
    }
    std::map<std::string, int> received;
    std::set<std::pair<std::string, std::string>> pairs;
    for (const auto& c : b.comments) {
        validate_comment(c);
        if (!members.count(c.from_agent) || !members.count(c.to_agent)) {
            throw Error::validation("feedback bundle: comment between non-panel agents " + c.from_agent +
                                    "->" + c.to_agent);
        }
        if (!pairs.insert({c.from_agent, c.to_agent}).second) {
            throw Error::validation("feedback bundle: duplicate comment pair " + c.from_agent + "->" +
                                    c.to_agent);
        }
        received[c.to_agent]++;
    }
    for (const auto& id : b.panel) {
        if (received[id] != 4) {
            throw Error::validation("feedback bundle: agent " + id + " received " +
                                    std::to_string(received[id]) + " comments, expected 4");
        }
    }

    if (b.final_child.empty() || b.final_adult.empty()) {
        throw Error::validation("feedback bundle: final feedback sections must be non-empty");
    }
}

} // namespace famlens
