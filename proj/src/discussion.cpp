// SPDX-License-Identifier: Apache-2.0
#include "famlens/discussion.hpp"

#include "famlens/error.hpp"
#include "famlens/structured.hpp"

#include <nlohmann/json.hpp>

#include <sstream>

namespace famlens {

namespace {

using nlohmann::json;

/// Forwards to the inner provider and appends (tag, hashes) to a slot-local
/// log. Each slot is owned by one task, so no locking is needed.
class SlotRecorder final : public ChatProvider {
public:
    SlotRecorder(ChatProvider& inner, int step, std::string agent, std::vector<CallLogEntry>& out)
        : inner_(inner), step_(step), agent_(std::move(agent)), out_(out) {}

    std::string chat_complete(const ChatRequest& req) override {
        const std::string response = inner_.chat_complete(req);
        out_.push_back({step_, req.tag, agent_, prompt_hash(req), response_hash(response)});
        return response;
    }
    std::string provider_id() const override { return inner_.provider_id(); }

private:
    ChatProvider& inner_;
    int step_;
    std::string agent_;
    std::vector<CallLogEntry>& out_;
};

std::string require_section(const json& obj, const char* key) {
    if (!obj.contains(key) || !obj[key].is_string() || obj[key].get<std::string>().empty()) {
        throw OutputViolation(std::string("missing or empty section '") + key + "'");
    }
    return obj[key].get<std::string>();
}

json parse_reply_object(const std::string& raw) {
    const std::string body = extract_json_object(raw);
    json parsed = json::parse(body, nullptr, false);
    if (parsed.is_discarded() || !parsed.is_object()) {
        throw OutputViolation("reply is not a parseable JSON object");
    }
    return parsed;
}

std::string render_draft_text(const FeedbackDraft& draft) {
    return "child-directed: " + draft.child_feedback + "\nadult-directed: " + draft.adult_feedback;
}

FeedbackDraft draft_for_agent(const AgentContext& ctx, const ExpertProfile& profile, int round,
                              const std::map<std::string, std::string>& vars,
                              const std::string& template_name) {
    ChatRequest req = ctx.prompts.make_request(template_name, vars);
    const auto envelope = request_structured(
        ctx.chat, std::move(req),
        [&](const std::string& raw) {
            const json obj = parse_reply_object(raw);
            FeedbackDraft draft;
            draft.agent_id = profile.id;
            draft.round = round;
            draft.child_feedback = require_section(obj, "child_feedback");
            draft.adult_feedback = require_section(obj, "adult_feedback");
            return draft;
        },
        ctx.max_repairs);
    return envelope.value;
}

FeedbackDraft initial_draft_for(const AgentContext& ctx, const ExpertPool& pool,
                                const std::string& agent_id, const Dialogue& d,
                                const SituationReport& r_child, const SituationReport& r_adult) {
    const ExpertProfile& profile = pool.by_id(agent_id);
    try {
        return draft_for_agent(ctx, profile, 0,
                               {{"background", profile.background_doc},
                                {"dialogue", render_dialogue_text(d)},
                                {"reports", render_report_pair_text(r_child, r_adult)}},
                               "expert_draft");
    } catch (const Error& e) {
        throw Error(e.kind(), "agent '" + agent_id + "' draft: " + e.what());
    }
}

PeerComment comment_for_pair(const AgentContext& ctx, const ExpertPool& pool,
                             const std::string& reviewer_id, const FeedbackDraft& author_draft) {
    const ExpertProfile& reviewer = pool.by_id(reviewer_id);
    try {
        const ChatRequest req =
            ctx.prompts.make_request("peer_comment",
                                     {{"background", reviewer.background_doc},
                                      {"author_id", author_draft.agent_id},
                                      {"draft", render_draft_text(author_draft)}});
        PeerComment comment;
        comment.from_agent = reviewer_id;
        comment.to_agent = author_draft.agent_id;
        comment.content = chat_complete(ctx.chat, req);
        return comment;
    } catch (const Error& e) {
        throw Error(e.kind(),
                    "comment '" + reviewer_id + "->" + author_draft.agent_id + "': " + e.what());
    }
}

FeedbackDraft refined_draft_for(const AgentContext& ctx, const ExpertPool& pool,
                                const FeedbackDraft& own_draft,
                                const std::vector<PeerComment>& received) {
    const ExpertProfile& profile = pool.by_id(own_draft.agent_id);
    std::ostringstream comment_block;
    for (const auto& comment : received) {
        comment_block << "from " << comment.from_agent << ": " << comment.content << "\n";
    }
    try {
        return draft_for_agent(ctx, profile, 1,
                               {{"background", profile.background_doc},
                                {"draft", render_draft_text(own_draft)},
                                {"comments", comment_block.str()}},
                               "refine_draft");
    } catch (const Error& e) {
        throw Error(e.kind(), "agent '" + own_draft.agent_id + "' refinement: " + e.what());
    }
}

void check_panel_drafts(const ExpertPanel& panel, const std::vector<FeedbackDraft>& drafts,
                        int round) {
    const auto ids = panel.members();
    if (drafts.size() != ids.size()) {
        throw Error::validation("expected one draft per panel agent");
    }
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (drafts[i].agent_id != ids[i] || drafts[i].round != round) {
            throw Error::validation("drafts must follow panel order with round " +
                                    std::to_string(round));
        }
    }
}

} // namespace

std::string serialize_transcript_log(const DiscussionTranscript& t) {
    std::string out;
    for (const auto& call : t.calls) {
        out += "step=" + std::to_string(call.step) + " tag=" + call.tag + " agent=" + call.agent +
               " prompt=" + call.prompt_hash + " response=" + call.response_hash + "\n";
    }
    return out;
}

std::vector<FeedbackDraft> initial_drafts(const AgentContext& ctx, const ExpertPool& pool,
                                          const ExpertPanel& panel, const Dialogue& d,
                                          const SituationReport& r_child,
                                          const SituationReport& r_adult) {
    validate_dialogue(d);
    const auto ids = panel.members();
    std::vector<FeedbackDraft> drafts(ids.size());
    parallel_for(ids.size(), ctx.concurrency_cap, [&](std::size_t i) {
        drafts[i] = initial_draft_for(ctx, pool, ids[i], d, r_child, r_adult);
    });
    return drafts;
}

std::vector<PeerComment> peer_comments(const AgentContext& ctx, const ExpertPool& pool,
                                       const ExpertPanel& panel,
                                       const std::vector<FeedbackDraft>& drafts) {
    check_panel_drafts(panel, drafts, 0);
    const auto ids = panel.members();

    // Fixed enumeration of the 20 ordered (reviewer, author) pairs.
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t reviewer = 0; reviewer < ids.size(); ++reviewer) {
        for (std::size_t author = 0; author < ids.size(); ++author) {
            if (reviewer != author) {
                pairs.emplace_back(reviewer, author);
            }
        }
    }

    std::vector<PeerComment> comments(pairs.size());
    parallel_for(pairs.size(), ctx.concurrency_cap, [&](std::size_t i) {
        const auto [reviewer, author] = pairs[i];
        comments[i] = comment_for_pair(ctx, pool, ids[reviewer], drafts[author]);
    });
    return comments;
}

std::vector<FeedbackDraft> refine_drafts(const AgentContext& ctx, const ExpertPool& pool,
                                         const ExpertPanel& panel,
                                         const std::vector<FeedbackDraft>& drafts,
                                         const std::vector<PeerComment>& comments) {
    check_panel_drafts(panel, drafts, 0);
    const auto ids = panel.members();

    std::vector<FeedbackDraft> refined(ids.size());
    parallel_for(ids.size(), ctx.concurrency_cap, [&](std::size_t i) {
        std::vector<PeerComment> received;
        for (const auto& comment : comments) {
            if (comment.to_agent == ids[i]) {
                received.push_back(comment);
            }
        }
        if (received.size() != 4) {
            throw Error::validation("agent '" + ids[i] + "' must receive exactly 4 comments, got " +
                                    std::to_string(received.size()));
        }
        refined[i] = refined_draft_for(ctx, pool, drafts[i], received);
    });
    return refined;
}

std::pair<std::string, std::string> integrate_final(const AgentContext& ctx,
                                                    const std::vector<FeedbackDraft>& refined) {
    if (refined.size() != 5) {
        throw Error::validation("integration needs exactly five refined drafts");
    }
    std::ostringstream draft_block;
    for (const auto& draft : refined) {
        draft_block << "agent " << draft.agent_id << ":\n" << render_draft_text(draft) << "\n\n";
    }
    ChatRequest req = ctx.prompts.make_request("integrate_final", {{"drafts", draft_block.str()}});
    const auto envelope = request_structured(
        ctx.chat, std::move(req),
        [](const std::string& raw) {
            const json obj = parse_reply_object(raw);
            return std::make_pair(require_section(obj, "final_child"),
                                  require_section(obj, "final_adult"));
        },
        ctx.max_repairs);
    return envelope.value;
}

DiscussionResult run_discussion(const AgentContext& ctx, const ExpertPool& pool,
                                const ExpertPanel& panel, const Dialogue& d,
                                const SituationReport& r_child, const SituationReport& r_adult) {
    validate_dialogue(d);
    const auto ids = panel.members();

    DiscussionResult result;
    result.bundle.scenario_id = d.scenario_id;
    result.bundle.panel = ids;
    result.transcript.scenario_id = d.scenario_id;
    result.transcript.panel = panel;

    // Each logical call gets a slot-local log; slots are flattened in
    // enumeration order after each step, so the transcript is deterministic
    // under any scheduling.

    // Step 1: initial drafts.
    {
        std::vector<std::vector<CallLogEntry>> logs(ids.size());
        result.bundle.initial_drafts.resize(ids.size());
        parallel_for(ids.size(), ctx.concurrency_cap, [&](std::size_t i) {
            SlotRecorder recorder(ctx.chat, 1, ids[i], logs[i]);
            AgentContext local{recorder, ctx.prompts, ctx.max_repairs, 1};
            result.bundle.initial_drafts[i] = initial_draft_for(local, pool, ids[i], d, r_child, r_adult);
        });
        for (auto& slot : logs) {
            result.transcript.calls.insert(result.transcript.calls.end(), slot.begin(), slot.end());
        }
    }

    // Step 2: peer comments over the 20 ordered pairs.
    {
        std::vector<std::pair<std::size_t, std::size_t>> pairs;
        for (std::size_t reviewer = 0; reviewer < ids.size(); ++reviewer) {
            for (std::size_t author = 0; author < ids.size(); ++author) {
                if (reviewer != author) {
                    pairs.emplace_back(reviewer, author);
                }
            }
        }
        std::vector<std::vector<CallLogEntry>> logs(pairs.size());
        result.bundle.comments.resize(pairs.size());
        parallel_for(pairs.size(), ctx.concurrency_cap, [&](std::size_t i) {
            const auto [reviewer, author] = pairs[i];
            SlotRecorder recorder(ctx.chat, 2, ids[reviewer] + "->" + ids[author], logs[i]);
            AgentContext local{recorder, ctx.prompts, ctx.max_repairs, 1};
            result.bundle.comments[i] =
                comment_for_pair(local, pool, ids[reviewer], result.bundle.initial_drafts[author]);
        });
        for (auto& slot : logs) {
            result.transcript.calls.insert(result.transcript.calls.end(), slot.begin(), slot.end());
        }
    }

    // Step 3: refinements.
    {
        std::vector<std::vector<CallLogEntry>> logs(ids.size());
        result.bundle.refined_drafts.resize(ids.size());
        parallel_for(ids.size(), ctx.concurrency_cap, [&](std::size_t i) {
            std::vector<PeerComment> received;
            for (const auto& comment : result.bundle.comments) {
                if (comment.to_agent == ids[i]) {
                    received.push_back(comment);
                }
            }
            SlotRecorder recorder(ctx.chat, 3, ids[i], logs[i]);
            AgentContext local{recorder, ctx.prompts, ctx.max_repairs, 1};
            result.bundle.refined_drafts[i] =
                refined_draft_for(local, pool, result.bundle.initial_drafts[i], received);
        });
        for (auto& slot : logs) {
            result.transcript.calls.insert(result.transcript.calls.end(), slot.begin(), slot.end());
        }
    }

    // Step 4: integration.
    {
        std::vector<CallLogEntry> log;
        SlotRecorder recorder(ctx.chat, 4, "meta", log);
        AgentContext local{recorder, ctx.prompts, ctx.max_repairs, 1};
        try {
            std::tie(result.bundle.final_child, result.bundle.final_adult) =
                integrate_final(local, result.bundle.refined_drafts);
        } catch (const Error& e) {
            throw Error(e.kind(), "integration: " + std::string(e.what()));
        }
        result.transcript.calls.insert(result.transcript.calls.end(), log.begin(), log.end());
    }

    validate_feedback_bundle(result.bundle);
    return result;
}

} // namespace famlens
