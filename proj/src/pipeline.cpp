// SPDX-License-Identifier: Apache-2.0
#include "famlens/pipeline.hpp"

#include "famlens/csv.hpp"
#include "famlens/detection.hpp"
#include "famlens/discussion.hpp"
#include "famlens/error.hpp"
#include "famlens/fsio.hpp"
#include "famlens/http_backend.hpp"
#include "famlens/scripted.hpp"
#include "famlens/simulate.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <set>

namespace famlens {

namespace {

using nlohmann::json;

/// Overrides the request temperature so a config-pinned value applies to
/// every call regardless of the template defaults.
class TemperaturePinnedProvider final : public ChatProvider {
public:
    TemperaturePinnedProvider(std::unique_ptr<ChatProvider> inner, double temperature)
        : inner_(std::move(inner)), temperature_(temperature) {}

    std::string chat_complete(const ChatRequest& req) override {
        ChatRequest pinned = req;
        pinned.temperature = temperature_;
        return inner_->chat_complete(pinned);
    }
    std::string provider_id() const override { return inner_->provider_id(); }

private:
    std::unique_ptr<ChatProvider> inner_;
    double temperature_;
};

HttpProviderConfig http_config_from(const RunConfig& cfg) {
    HttpProviderConfig http;
    http.base_url = cfg.base_url;
    http.chat_model = cfg.model_name;
    http.embedding_model = cfg.embedding_model;
    http.api_key_env = cfg.api_key_env;
    http.embedding_dimension = cfg.embedding_dimension;
    return http;
}

/// Sorted scenario ids from `<id>.csv` files, skipping the manifest.
std::vector<std::string> list_scenario_ids(const std::filesystem::path& corpus_dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(corpus_dir)) {
        throw Error::usage("corpus directory not found: " + corpus_dir.string());
    }
    std::vector<std::string> ids;
    for (const auto& entry : fs::directory_iterator(corpus_dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".csv") {
            continue;
        }
        const std::string stem = entry.path().stem().string();
        if (stem == "manifest" || stem == "predictions" || stem == "panel") {
            continue;
        }
        ids.push_back(stem);
    }
    if (ids.empty()) {
        throw Error::usage("no dialogue CSVs in " + corpus_dir.string());
    }
    std::sort(ids.begin(), ids.end());
    return ids;
}

Dialogue load_corpus_dialogue(const std::filesystem::path& corpus_dir, const std::string& id,
                              const std::string& language_tag) {
    return parse_dialogue_csv(read_text_file(corpus_dir / (id + ".csv")), id, language_tag);
}

std::string manifest_csv(const std::vector<ScenarioStatus>& statuses) {
    std::string out = "scenario_id,status\n";
    for (const auto& s : statuses) {
        out += csv::write_row({s.scenario_id, s.ok ? std::string("ok") : "failed: " + s.detail});
    }
    return out;
}

int exit_code_from(const std::vector<ScenarioStatus>& statuses) {
    for (const auto& s : statuses) {
        if (!s.ok) {
            return exit_code_for(s.error_kind.value_or(ErrorKind::validation));
        }
    }
    return 0;
}

std::string draft_json(const FeedbackDraft& draft) {
    json doc = {
        {"agent_id", draft.agent_id},
        {"round", draft.round},
        {"child_feedback", draft.child_feedback},
        {"adult_feedback", draft.adult_feedback},
    };
    return doc.dump(2) + "\n";
}

GenerationConfig generation_config_from(const RunConfig& cfg, std::optional<int> turns) {
    GenerationConfig g;
    g.turn_count = turns.value_or(cfg.turn_count);
    g.stop_conditions = cfg.stop_conditions;
    g.language_tag = cfg.language_tag;
    return g;
}

} // namespace

Runtime make_runtime(const RunConfig& cfg) {
    validate_run_config(cfg);
    Runtime rt;
    rt.config = cfg;
    rt.prompts = std::make_unique<PromptLibrary>(cfg.prompt_template_dir);

    std::unique_ptr<ChatProvider> chat;
    if (cfg.backend == RunConfig::Backend::http) {
        chat = std::make_unique<HttpChatProvider>(http_config_from(cfg));
    } else {
        chat = std::make_unique<ScriptedChatProvider>(cfg.fixtures_dir);
    }
    if (cfg.temperature) {
        chat = std::make_unique<TemperaturePinnedProvider>(std::move(chat), *cfg.temperature);
    }
    rt.chat = std::make_unique<ThrottledChatProvider>(std::move(chat), cfg.concurrency_cap);

    std::unique_ptr<EmbeddingProvider> embeddings;
    if (cfg.embedding == RunConfig::EmbeddingMode::remote) {
        embeddings = std::make_unique<HttpEmbeddingProvider>(http_config_from(cfg));
    } else {
        embeddings = std::make_unique<HashEmbeddingProvider>(cfg.embedding_dimension);
    }
    rt.embeddings =
        std::make_unique<ThrottledEmbeddingProvider>(std::move(embeddings), cfg.concurrency_cap);
    return rt;
}

CommandResult cmd_generate(const RunConfig& cfg, const std::filesystem::path& metas_path,
                           const std::filesystem::path& out_dir, std::optional<int> turns) {
    namespace fs = std::filesystem;
    Runtime rt = make_runtime(cfg);

    std::vector<fs::path> meta_files;
    if (fs::is_directory(metas_path)) {
        for (const auto& entry : fs::directory_iterator(metas_path)) {
            if (entry.is_regular_file() && entry.path().extension() == ".meta") {
                meta_files.push_back(entry.path());
            }
        }
        std::sort(meta_files.begin(), meta_files.end());
    } else if (fs::is_regular_file(metas_path)) {
        meta_files.push_back(metas_path);
    } else {
        throw Error::usage("metas path not found: " + metas_path.string());
    }
    if (meta_files.empty()) {
        throw Error::usage("no .meta files in " + metas_path.string());
    }

    std::vector<ScenarioMetadata> metas;
    std::set<std::string> seen;
    for (const auto& file : meta_files) {
        ScenarioMetadata meta = load_scenario_metadata(read_text_file(file));
        if (!seen.insert(meta.scenario_id).second) {
            throw Error::validation("duplicate scenario_id '" + meta.scenario_id + "' in " +
                                    metas_path.string());
        }
        metas.push_back(std::move(meta));
    }

    const auto entries =
        generate_corpus(rt.agent_context(), metas, generation_config_from(cfg, turns), out_dir);

    CommandResult result;
    for (const auto& entry : entries) {
        result.scenarios.push_back({entry.scenario_id, entry.ok, entry.detail, entry.error_kind});
    }
    result.exit_code = exit_code_from(result.scenarios);
    return result;
}

CommandResult cmd_analyze(const RunConfig& cfg, const std::filesystem::path& corpus_dir,
                          const std::filesystem::path& out_dir) {
    Runtime rt = make_runtime(cfg);
    const auto ids = list_scenario_ids(corpus_dir);
    std::filesystem::create_directories(out_dir);

    CommandResult result;
    std::vector<PredictionRecord> predictions;
    for (const auto& id : ids) {
        ScenarioStatus status;
        status.scenario_id = id;
        try {
            const Dialogue d = load_corpus_dialogue(corpus_dir, id, cfg.language_tag);
            const ScenarioMetadata meta =
                load_scenario_metadata(read_text_file(corpus_dir / (id + ".meta")));
            if (meta.scenario_id != id) {
                throw Error::validation("metadata scenario_id '" + meta.scenario_id +
                                        "' does not match file name '" + id + "'");
            }

            const AnalysisResult analysis = analyze(rt.agent_context(), d);
            write_text_file(out_dir / (id + ".child.report"),
                            serialize_report_json(analysis.child));
            write_text_file(out_dir / (id + ".adult.report"),
                            serialize_report_json(analysis.adult));

            // A prediction row needs gold labels; scenarios without gold
            // suppression are analyzed but not scored.
            if (meta.suppression.present) {
                const auto& sup = std::get<SuppressionReport>(analysis.child.source_detection);
                PredictionRecord record;
                record.scenario_id = id;
                record.gold_suppression = *meta.suppression.category;
                record.predicted_suppression = sup.suppression_type;
                record.system_confidence = sup.c;
                record.gold_age = meta.child_persona.age;
                record.predicted_age = analysis.child.attributes.age;
                predictions.push_back(std::move(record));
            }
            status.ok = true;
        } catch (const Error& e) {
            status.detail = e.what();
            status.error_kind = e.kind();
        }
        result.scenarios.push_back(std::move(status));
    }

    write_text_file(out_dir / "predictions.csv", serialize_predictions_csv(predictions, {}));
    write_text_file(out_dir / "manifest.csv", manifest_csv(result.scenarios));
    result.exit_code = exit_code_from(result.scenarios);
    return result;
}

CommandResult cmd_feedback(const RunConfig& cfg, const std::filesystem::path& corpus_dir,
                           const std::filesystem::path& reports_dir,
                           const std::filesystem::path& out_dir, bool dump_ranking) {
    Runtime rt = make_runtime(cfg);
    const ExpertPool pool = load_pool(cfg.pool_dir);
    PoolEmbeddingCache cache;
    const auto ids = list_scenario_ids(corpus_dir);
    std::filesystem::create_directories(out_dir);

    CommandResult result;
    std::string panel_csv = "scenario_id,agent_1,agent_2,agent_3,agent_4,agent_5\n";
    for (const auto& id : ids) {
        ScenarioStatus status;
        status.scenario_id = id;
        try {
            const Dialogue d = load_corpus_dialogue(corpus_dir, id, cfg.language_tag);
            const SituationReport r_child =
                parse_report_json(read_text_file(reports_dir / (id + ".child.report")));
            const SituationReport r_adult =
                parse_report_json(read_text_file(reports_dir / (id + ".adult.report")));

            const RankedPool ranked =
                rank_pool(pool, *rt.embeddings, r_child, r_adult, cfg.pair_embedding,
                          cfg.concurrency_cap, &cache);
            if (dump_ranking) {
                write_text_file(out_dir / (id + ".ranking.csv"), serialize_ranking_csv(ranked));
            }
            const ExpertPanel panel =
                select_panel(rt.agent_context(), pool, ranked, r_child, r_adult);
            const DiscussionResult discussion =
                run_discussion(rt.agent_context(), pool, panel, d, r_child, r_adult);

            const auto scenario_dir = out_dir / id;
            for (const auto& draft : discussion.bundle.initial_drafts) {
                write_text_file(scenario_dir / "drafts0" / (draft.agent_id + ".json"),
                                draft_json(draft));
            }
            for (const auto& comment : discussion.bundle.comments) {
                write_text_file(scenario_dir / "comments" /
                                    (comment.from_agent + "--" + comment.to_agent + ".txt"),
                                comment.content + "\n");
            }
            for (const auto& draft : discussion.bundle.refined_drafts) {
                write_text_file(scenario_dir / "drafts1" / (draft.agent_id + ".json"),
                                draft_json(draft));
            }
            write_text_file(scenario_dir / "final.child", discussion.bundle.final_child + "\n");
            write_text_file(scenario_dir / "final.adult", discussion.bundle.final_adult + "\n");
            write_text_file(scenario_dir / "transcript.log",
                            serialize_transcript_log(discussion.transcript));

            std::vector<std::string> row = {id};
            for (const auto& member : panel.members()) {
                row.push_back(member);
            }
            panel_csv += csv::write_row(row);
            status.ok = true;
        } catch (const Error& e) {
            status.detail = e.what();
            status.error_kind = e.kind();
        }
        result.scenarios.push_back(std::move(status));
    }

    write_text_file(out_dir / "panel.csv", panel_csv);
    write_text_file(out_dir / "manifest.csv", manifest_csv(result.scenarios));
    result.exit_code = exit_code_from(result.scenarios);
    return result;
}

CommandResult cmd_simulate(const RunConfig& cfg, const std::filesystem::path& corpus_dir,
                           const std::filesystem::path& feedback_dir,
                           const std::filesystem::path& out_dir, std::optional<int> turns) {
    Runtime rt = make_runtime(cfg);
    const auto ids = list_scenario_ids(corpus_dir);
    std::filesystem::create_directories(out_dir);

    CommandResult result;
    for (const auto& id : ids) {
        ScenarioStatus status;
        status.scenario_id = id;
        try {
            const Dialogue d = load_corpus_dialogue(corpus_dir, id, cfg.language_tag);
            const std::string final_child = read_text_file(feedback_dir / id / "final.child");
            const std::string final_adult = read_text_file(feedback_dir / id / "final.adult");

            GenerationConfig g = generation_config_from(cfg, turns);
            if (!turns) {
                g.turn_count = static_cast<int>(d.turns.size()); // mirror the original
            }
            const Dialogue post = simulate_post_feedback(rt.agent_context(), d, final_child,
                                                         final_adult, g);
            write_text_file(out_dir / (post.scenario_id + ".csv"), serialize_dialogue_csv(post));
            status.ok = true;
        } catch (const Error& e) {
            status.detail = e.what();
            status.error_kind = e.kind();
        }
        result.scenarios.push_back(std::move(status));
    }

    write_text_file(out_dir / "manifest.csv", manifest_csv(result.scenarios));
    result.exit_code = exit_code_from(result.scenarios);
    return result;
}

int cmd_eval(const EvalOptions& options) {
    const auto records =
        parse_predictions_csv(read_text_file(options.predictions_path), options.confidence_scale);

    if (options.gold_dir) {
        for (const auto& record : records) {
            const ScenarioMetadata meta = load_scenario_metadata(
                read_text_file(*options.gold_dir / (record.scenario_id + ".meta")));
            if (!meta.suppression.present) {
                throw Error::validation("scenario '" + record.scenario_id +
                                        "' has no gold suppression in its metadata");
            }
            if (*meta.suppression.category != record.gold_suppression) {
                throw Error::validation("gold suppression mismatch for '" + record.scenario_id +
                                        "' between predictions CSV and metadata");
            }
            if (meta.child_persona.age != record.gold_age) {
                throw Error::validation("gold age mismatch for '" + record.scenario_id +
                                        "' between predictions CSV and metadata");
            }
        }
    }

    const MetricsSummary metrics = classification_metrics(records);

    std::optional<ConfidenceReport> confidence;
    const bool all_have_human =
        std::all_of(records.begin(), records.end(),
                    [](const PredictionRecord& r) { return !r.human_confidences.empty(); });
    if (all_have_human) {
        confidence = confidence_report(records);
    }

    std::vector<LikertSummaryRow> likert;
    if (options.ratings_path) {
        likert = likert_summary(parse_ratings_csv(read_text_file(*options.ratings_path)));
    }

    std::filesystem::create_directories(options.out_dir);
    write_text_file(options.out_dir / "metrics.csv", serialize_metrics_csv(metrics));
    write_text_file(options.out_dir / "confusion.csv", serialize_confusion_csv(metrics.confusion));
    if (confidence) {
        write_text_file(options.out_dir / "confidence.csv", serialize_confidence_csv(*confidence));
    }
    if (!likert.empty()) {
        write_text_file(options.out_dir / "likert_summary.csv",
                        serialize_likert_summary_csv(likert));
    }
    write_text_file(options.out_dir / "report.md", render_report_md(metrics, confidence, likert));
    return 0;
}

} // namespace famlens
