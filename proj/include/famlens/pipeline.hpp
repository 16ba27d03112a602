// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "famlens/agents.hpp"
#include "famlens/config.hpp"
#include "famlens/error.hpp"
#include "famlens/eval.hpp"

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace famlens {

/// Concrete providers and templates for one run, built from RunConfig. The
/// chat provider is wrapped so the configured temperature (if any) and the
/// global in-flight cap apply everywhere.
struct Runtime {
    RunConfig config;
    std::unique_ptr<ChatProvider> chat;
    std::unique_ptr<EmbeddingProvider> embeddings;
    std::unique_ptr<PromptLibrary> prompts;

    AgentContext agent_context() {
        return {*chat, *prompts, config.max_repairs, config.concurrency_cap};
    }
};

Runtime make_runtime(const RunConfig& cfg);

struct ScenarioStatus {
    std::string scenario_id;
    bool ok = false;
    std::string detail;
    std::optional<ErrorKind> error_kind;
};

/// Batch outcome: per-scenario statuses in input order. exit_code is 0 when
/// everything succeeded, otherwise the code for the first failure.
struct CommandResult {
    std::vector<ScenarioStatus> scenarios;
    int exit_code = 0;
};

/// generate: role-play every scenario metadata file into a corpus directory.
/// metas_path is a `.meta` file or a directory of them (sorted by filename).
CommandResult cmd_generate(const RunConfig& cfg, const std::filesystem::path& metas_path,
                           const std::filesystem::path& out_dir,
                           std::optional<int> turns = std::nullopt);

/// analyze: run detection on every corpus dialogue; writes
/// `<id>.child.report`, `<id>.adult.report`, `predictions.csv`, and
/// `manifest.csv`.
CommandResult cmd_analyze(const RunConfig& cfg, const std::filesystem::path& corpus_dir,
                          const std::filesystem::path& out_dir);

/// feedback: rank the expert pool, select the panel, and run the discussion
/// per scenario; writes per-scenario bundle directories, `panel.csv`, and
/// `manifest.csv`.
CommandResult cmd_feedback(const RunConfig& cfg, const std::filesystem::path& corpus_dir,
                           const std::filesystem::path& reports_dir,
                           const std::filesystem::path& out_dir, bool dump_ranking = false);

/// simulate: regenerate each dialogue with the final feedback injected;
/// writes `<id>-post.csv` files and `manifest.csv`. The follow-up length
/// mirrors the original unless `turns` overrides it.
CommandResult cmd_simulate(const RunConfig& cfg, const std::filesystem::path& corpus_dir,
                           const std::filesystem::path& feedback_dir,
                           const std::filesystem::path& out_dir,
                           std::optional<int> turns = std::nullopt);

struct EvalOptions {
    std::filesystem::path predictions_path;
    std::optional<std::filesystem::path> gold_dir; // corpus dir to cross-check gold columns
    std::optional<std::filesystem::path> ratings_path;
    ConfidenceScale confidence_scale = ConfidenceScale::unit;
    std::filesystem::path out_dir;
};

/// eval: metrics.csv, confusion.csv, report.md, plus confidence.csv and
/// likert_summary.csv when the corresponding inputs are present.
int cmd_eval(const EvalOptions& options);

} // namespace famlens
