// SPDX-License-Identifier: Apache-2.0
#include "famlens/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <string>

namespace {

void print_failures(const famlens::CommandResult& result) {
    for (const auto& scenario : result.scenarios) {
        if (!scenario.ok) {
            std::fprintf(stderr, "famlens: %s failed: %s\n", scenario.scenario_id.c_str(),
                         scenario.detail.c_str());
        }
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Parent-child dialogue analysis and feedback pipeline"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::string metas_path;
    std::string corpus_dir;
    std::string reports_dir;
    std::string feedback_dir;
    std::string predictions_path;
    std::string gold_dir;
    std::string ratings_path;
    std::string confidence_scale = "unit";
    int turns = 0;
    bool dump_ranking = false;

    auto* generate = app.add_subcommand("generate", "Generate a scenario corpus by role play");
    generate->add_option("--config", config_path, "Run configuration file")->required();
    generate->add_option("--metas", metas_path, "Scenario metadata file or directory")->required();
    generate->add_option("--out", out_dir, "Output corpus directory")->required();
    generate->add_option("--turns", turns, "Turns per dialogue (default from config)");

    auto* analyze = app.add_subcommand("analyze", "Detect suppression and bias per scenario");
    analyze->add_option("--config", config_path, "Run configuration file")->required();
    analyze->add_option("--corpus", corpus_dir, "Corpus directory")->required();
    analyze->add_option("--out", out_dir, "Output reports directory")->required();

    auto* feedback = app.add_subcommand("feedback", "Run the five-expert discussion per scenario");
    feedback->add_option("--config", config_path, "Run configuration file")->required();
    feedback->add_option("--corpus", corpus_dir, "Corpus directory")->required();
    feedback->add_option("--reports", reports_dir, "Reports directory from analyze")->required();
    feedback->add_option("--out", out_dir, "Output feedback directory")->required();
    feedback->add_flag("--dump-ranking", dump_ranking, "Also write per-scenario ranking CSVs");

    auto* simulate = app.add_subcommand("simulate", "Simulate post-feedback dialogues");
    simulate->add_option("--config", config_path, "Run configuration file")->required();
    simulate->add_option("--corpus", corpus_dir, "Corpus directory")->required();
    simulate->add_option("--feedback", feedback_dir, "Feedback directory")->required();
    simulate->add_option("--out", out_dir, "Output directory")->required();
    simulate->add_option("--turns", turns, "Turns per follow-up (default mirrors the original)");

    auto* eval = app.add_subcommand("eval", "Compute evaluation metrics and reports");
    eval->add_option("--predictions", predictions_path, "Predictions CSV")->required();
    eval->add_option("--gold", gold_dir, "Corpus directory to cross-check gold labels");
    eval->add_option("--ratings", ratings_path, "Likert ratings CSV");
    eval->add_option("--confidence-scale", confidence_scale,
                     "Scale of human confidence inputs: unit or percent");
    eval->add_option("--out", out_dir, "Output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (generate->parsed()) {
            const famlens::RunConfig cfg = famlens::load_run_config(config_path);
            const auto result = famlens::cmd_generate(
                cfg, metas_path, out_dir,
                turns > 0 ? std::optional<int>(turns) : std::nullopt);
            print_failures(result);
            return result.exit_code;
        }
        if (analyze->parsed()) {
            const famlens::RunConfig cfg = famlens::load_run_config(config_path);
            const auto result = famlens::cmd_analyze(cfg, corpus_dir, out_dir);
            print_failures(result);
            return result.exit_code;
        }
        if (feedback->parsed()) {
            const famlens::RunConfig cfg = famlens::load_run_config(config_path);
            const auto result =
                famlens::cmd_feedback(cfg, corpus_dir, reports_dir, out_dir, dump_ranking);
            print_failures(result);
            return result.exit_code;
        }
        if (simulate->parsed()) {
            const famlens::RunConfig cfg = famlens::load_run_config(config_path);
            const auto result = famlens::cmd_simulate(
                cfg, corpus_dir, feedback_dir, out_dir,
                turns > 0 ? std::optional<int>(turns) : std::nullopt);
            print_failures(result);
            return result.exit_code;
        }
        famlens::EvalOptions options;
        options.predictions_path = predictions_path;
        if (!gold_dir.empty()) {
            options.gold_dir = gold_dir;
        }
        if (!ratings_path.empty()) {
            options.ratings_path = ratings_path;
        }
        options.confidence_scale = famlens::parse_confidence_scale(confidence_scale);
        options.out_dir = out_dir;
        return famlens::cmd_eval(options);
    } catch (const famlens::Error& e) {
        std::fprintf(stderr, "famlens: %s\n", e.what());
        return famlens::exit_code_for(e.kind());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "famlens: unexpected error: %s\n", e.what());
        return 1;
    }
}
