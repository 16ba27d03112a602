// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "famlens/categories.hpp"

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace famlens {

/// Gold labels and system predictions for one scenario, plus per-rater human
/// confidence scores on the unit interval.
struct PredictionRecord {
    std::string scenario_id;
    SuppressionCategory gold_suppression = SuppressionCategory::anxiety;
    SuppressionCategory predicted_suppression = SuppressionCategory::anxiety;
    double system_confidence = 0.0;
    std::vector<double> human_confidences;
    int gold_age = 1;
    int predicted_age = 1;

    bool operator==(const PredictionRecord&) const = default;
};

void validate_record(const PredictionRecord& r);

enum class RatingTarget { child_feedback, adult_feedback, post_dialogue };
std::string_view to_string(RatingTarget t);
RatingTarget parse_rating_target(std::string_view s);

/// The fixed criterion keys for one rating target, in report order.
const std::vector<std::string>& criteria_for(RatingTarget target);

struct LikertRating {
    std::string rater_id;
    std::string scenario_id;
    RatingTarget target = RatingTarget::child_feedback;
    std::string criterion;
    int score = 1; // 1..5

    bool operator==(const LikertRating&) const = default;
};

void validate_rating(const LikertRating& r);

using ConfusionMatrix = std::array<std::array<int, 6>, 6>; // gold row x predicted column

struct MetricsSummary {
    double accuracy = 0.0;
    double precision = 0.0; // support-weighted
    double recall = 0.0;    // support-weighted; equals accuracy exactly
    double f1 = 0.0;        // support-weighted
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double macro_f1 = 0.0;
    ConfusionMatrix confusion{};
    double age_mae = 0.0;
    double mean_system_confidence = 0.0;
    std::optional<double> mean_human_confidence; // absent when any record has no human scores
    std::vector<SuppressionCategory> zero_support_classes;
};

/// Confusion matrix, accuracy, and precision/recall/F1 in both
/// support-weighted and macro variants (macro averages over all six classes;
/// zero-support classes contribute 0 and are flagged).
MetricsSummary classification_metrics(const std::vector<PredictionRecord>& records);

/// Mean absolute age error in years.
double age_mae(const std::vector<PredictionRecord>& records);

struct ConfidenceRow {
    std::string scenario_id;
    double system_confidence = 0.0;
    double human_confidence = 0.0; // mean over raters

    bool operator==(const ConfidenceRow&) const = default;
};

struct ConfidenceReport {
    double mean_system = 0.0;
    double mean_human = 0.0;
    std::vector<ConfidenceRow> rows; // record order
};

/// Per-scenario system-vs-human confidence plus grand means. Every record
/// must carry at least one human confidence.
ConfidenceReport confidence_report(const std::vector<PredictionRecord>& records);

struct LikertSummaryRow {
    std::string scope; // "rater" or "pooled"
    std::string rater_id;
    RatingTarget target = RatingTarget::child_feedback;
    std::string criterion;
    std::size_t count = 0;
    double mean = 0.0;
    double variance = 0.0; // population variance
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;

    bool operator==(const LikertSummaryRow&) const = default;
};

/// Per-(rater, target, criterion) and pooled cross-rater statistics, rows
/// ordered by target, criterion (fixed order), then rater with the pooled
/// row last. Quartiles use linear interpolation between order statistics.
std::vector<LikertSummaryRow> likert_summary(const std::vector<LikertRating>& ratings);

// -- CSV ingestion and serialization -----------------------------------------

enum class ConfidenceScale { unit, percent };
ConfidenceScale parse_confidence_scale(std::string_view s);

/// Header `scenario_id,gold_suppression,predicted_suppression,
/// system_confidence,gold_age,predicted_age` plus one
/// `human_confidence_<rater>` column per rater. The scale applies to the
/// human columns only; system confidence is always on [0,1]. An empty human
/// cell means that rater skipped the scenario.
std::vector<PredictionRecord> parse_predictions_csv(std::string_view bytes,
                                                    ConfidenceScale scale = ConfidenceScale::unit);

std::string serialize_predictions_csv(const std::vector<PredictionRecord>& records,
                                      const std::vector<std::string>& rater_ids);

/// Header `rater_id,scenario_id,target,criterion,score`; errors name rows.
std::vector<LikertRating> parse_ratings_csv(std::string_view bytes);
std::string serialize_ratings_csv(const std::vector<LikertRating>& ratings);

std::string serialize_metrics_csv(const MetricsSummary& m);
std::string serialize_confusion_csv(const ConfusionMatrix& confusion);
std::string serialize_confidence_csv(const ConfidenceReport& report);
std::string serialize_likert_summary_csv(const std::vector<LikertSummaryRow>& rows);

/// Human-readable evaluation report (markdown, no timestamps).
std::string render_report_md(const MetricsSummary& metrics,
                             const std::optional<ConfidenceReport>& confidence,
                             const std::vector<LikertSummaryRow>& likert);

} // namespace famlens
