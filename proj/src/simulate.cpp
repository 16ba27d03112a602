// SPDX-License-Identifier: Apache-2.0
#include "famlens/simulate.hpp"

#include "famlens/csv.hpp"
#include "famlens/error.hpp"
#include "famlens/fsio.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

namespace famlens {

namespace {

bool narrator_declined(const std::string& reply) {
    std::string trimmed;
    for (const char c : reply) {
        if (!std::isspace(static_cast<unsigned char>(c))) {
            trimmed += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        }
    }
    return trimmed == "none";
}

std::string render_partial_transcript(const Dialogue& d) {
    if (d.turns.empty()) {
        return "(the conversation has not started yet)";
    }
    return render_dialogue_text(d);
}

std::string suppression_text(const SuppressionSpec& s) {
    if (!s.present) {
        return "none";
    }
    return std::string(to_string(*s.category)) + " (strength " + std::to_string(*s.strength) +
           " of 5)";
}

/// Shared turn loop for first-pass generation and post-feedback simulation.
/// The extra per-speaker vars carry the audience-split feedback in post mode.
Dialogue run_role_play(const AgentContext& ctx, std::string scenario_id, Speaker starter,
                       int turn_count, const std::string& language_tag,
                       const std::string& parent_template, const std::string& child_template,
                       const std::map<std::string, std::string>& parent_vars,
                       const std::map<std::string, std::string>& child_vars) {
    Dialogue d;
    d.scenario_id = std::move(scenario_id);
    d.language_tag = language_tag;

    Speaker speaker = starter;
    for (int index = 1; index <= turn_count; ++index) {
        const bool is_parent = speaker == Speaker::parent;
        const std::string& template_name = is_parent ? parent_template : child_template;
        std::map<std::string, std::string> vars = is_parent ? parent_vars : child_vars;
        vars["transcript"] = render_partial_transcript(d);
        vars["turn_number"] = std::to_string(index);

        DialogueTurn turn;
        turn.index = index;
        turn.speaker = speaker;
        try {
            turn.content = chat_complete(ctx.chat, ctx.prompts.make_request(template_name, vars));
        } catch (const Error& e) {
            throw Error(e.kind(), "turn " + std::to_string(index) + " (" +
                                      std::string(to_string(speaker)) + "): " + e.what());
        }
        d.turns.push_back(std::move(turn));

        try {
            const std::string note = chat_complete(
                ctx.chat, ctx.prompts.make_request(
                              "gen_narrator", {{"transcript", render_dialogue_text(d)},
                                               {"turn_number", std::to_string(index)}}));
            if (!narrator_declined(note)) {
                d.turns.back().narrator_note = note;
            }
        } catch (const Error& e) {
            throw Error(e.kind(),
                        "turn " + std::to_string(index) + " (narrator): " + e.what());
        }

        speaker = other(speaker);
    }
    validate_dialogue(d);
    return d;
}

} // namespace

void validate_generation_config(const GenerationConfig& cfg) {
    if (cfg.turn_count < 2) {
        throw Error::validation("turn_count must be at least 2, got " +
                                std::to_string(cfg.turn_count));
    }
}

Dialogue generate_scenario(const AgentContext& ctx, const ScenarioMetadata& meta,
                           const GenerationConfig& cfg) {
    validate_scenario_metadata(meta);
    validate_generation_config(cfg);

    const Speaker starter = cfg.starter.value_or(meta.starter);
    const Topic topic = cfg.seed_topic.value_or(meta.topic);

    const std::map<std::string, std::string> parent_vars = {
        {"topic", topic_text(topic)},
        {"parent_gender", std::string(to_string(meta.parent_persona.gender))},
        {"upbringing", meta.parent_persona.upbringing_background},
        {"bias_category", std::string(to_string(meta.bias.category))},
        {"bias_strength", std::to_string(meta.bias.strength)},
        {"bias_background", meta.bias.formation_background},
        {"stop_conditions", cfg.stop_conditions},
    };
    const std::map<std::string, std::string> child_vars = {
        {"topic", topic_text(topic)},
        {"age", std::to_string(meta.child_persona.age)},
        {"personality", meta.child_persona.personality},
        {"suppression", suppression_text(meta.suppression)},
        {"stop_conditions", cfg.stop_conditions},
    };

    return run_role_play(ctx, meta.scenario_id, starter, cfg.turn_count, cfg.language_tag,
                         "gen_parent_turn", "gen_child_turn", parent_vars, child_vars);
}

std::string serialize_corpus_manifest(const std::vector<CorpusEntry>& entries) {
    std::string out = "scenario_id,status,turn_count\n";
    for (const auto& entry : entries) {
        out += csv::write_row({entry.scenario_id,
                               entry.ok ? std::string("ok") : "failed: " + entry.detail,
                               std::to_string(entry.turn_count)});
    }
    return out;
}

std::vector<CorpusEntry> generate_corpus(const AgentContext& ctx,
                                         const std::vector<ScenarioMetadata>& metas,
                                         const GenerationConfig& cfg,
                                         const std::filesystem::path& out_dir) {
    if (metas.empty()) {
        throw Error::usage("no scenario metadata to generate from");
    }
    validate_generation_config(cfg);
    std::filesystem::create_directories(out_dir);

    std::vector<CorpusEntry> entries(metas.size());
    // Scenario isolation: a failure lands in the manifest, never aborts the
    // batch. Each scenario touches only its own files.
    parallel_for(metas.size(), ctx.concurrency_cap, [&](std::size_t i) {
        CorpusEntry& entry = entries[i];
        entry.scenario_id = metas[i].scenario_id;
        try {
            const Dialogue d = generate_scenario(ctx, metas[i], cfg);
            write_text_file(out_dir / (d.scenario_id + ".csv"), serialize_dialogue_csv(d));
            write_text_file(out_dir / (d.scenario_id + ".meta"),
                            serialize_scenario_metadata(metas[i]));
            entry.ok = true;
            entry.turn_count = static_cast<int>(d.turns.size());
        } catch (const Error& e) {
            entry.ok = false;
            entry.detail = e.what();
            entry.error_kind = e.kind();
        }
    });

    write_text_file(out_dir / "manifest.csv", serialize_corpus_manifest(entries));
    return entries;
}

Dialogue simulate_post_feedback(const AgentContext& ctx, const Dialogue& original,
                                const std::string& final_child, const std::string& final_adult,
                                const GenerationConfig& cfg) {
    validate_dialogue(original);
    validate_generation_config(cfg);
    if (final_child.empty() || final_adult.empty()) {
        throw Error::validation("post-feedback simulation needs both final feedback texts");
    }

    const Speaker starter = cfg.starter.value_or(original.turns.front().speaker);
    const std::string original_text = render_dialogue_text(original);

    const std::map<std::string, std::string> parent_vars = {
        {"original_dialogue", original_text},
        {"feedback", final_adult},
        {"stop_conditions", cfg.stop_conditions},
    };
    const std::map<std::string, std::string> child_vars = {
        {"original_dialogue", original_text},
        {"feedback", final_child},
        {"stop_conditions", cfg.stop_conditions},
    };

    return run_role_play(ctx, original.scenario_id + "-post", starter, cfg.turn_count,
                         original.language_tag, "post_parent_turn", "post_child_turn", parent_vars,
                         child_vars);
}

} // namespace famlens
