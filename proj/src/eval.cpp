// SPDX-License-Identifier: Apache-2.0
#include "famlens/eval.hpp"

#include "famlens/csv.hpp"
#include "famlens/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>

namespace famlens {

namespace {

std::string fmt(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", value);
    return buf;
}

void require_non_empty(std::size_t size, const char* what) {
    if (size == 0) {
        throw Error::validation(std::string(what) + " must be non-empty");
    }
}

double mean_of(const std::vector<double>& values) {
    double sum = 0.0;
    for (const double v : values) {
        sum += v;
    }
    return sum / static_cast<double>(values.size());
}

double population_variance(const std::vector<double>& values, double mean) {
    double sum = 0.0;
    for (const double v : values) {
        sum += (v - mean) * (v - mean);
    }
    return sum / static_cast<double>(values.size());
}

/// Linear interpolation between order statistics (the common "type 7" rule).
double quantile_sorted(const std::vector<double>& sorted, double p) {
    const std::size_t n = sorted.size();
    if (n == 1) {
        return sorted[0];
    }
    const double h = static_cast<double>(n - 1) * p;
    const std::size_t lo = static_cast<std::size_t>(h);
    const double frac = h - static_cast<double>(lo);
    if (lo + 1 >= n) {
        return sorted[n - 1];
    }
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

double parse_confidence_field(const std::string& field, std::size_t line, const char* what,
                              ConfidenceScale scale) {
    std::size_t consumed = 0;
    double value = 0.0;
    try {
        value = std::stod(field, &consumed);
    } catch (const std::exception&) {
        throw Error::validation("row " + std::to_string(line) + ": " + what +
                                " is not a number: '" + field + "'");
    }
    if (consumed != field.size()) {
        throw Error::validation("row " + std::to_string(line) + ": " + what +
                                " is not a number: '" + field + "'");
    }
    if (scale == ConfidenceScale::percent) {
        value /= 100.0;
    }
    if (value < 0.0 || value > 1.0) {
        throw Error::validation("row " + std::to_string(line) + ": " + what +
                                " must lie in [0,1] after scaling, got " + fmt(value));
    }
    return value;
}

int parse_int_field(const std::string& field, std::size_t line, const char* what) {
    std::size_t consumed = 0;
    int value = 0;
    try {
        value = std::stoi(field, &consumed);
    } catch (const std::exception&) {
        throw Error::validation("row " + std::to_string(line) + ": " + what +
                                " is not an integer: '" + field + "'");
    }
    if (consumed != field.size()) {
        throw Error::validation("row " + std::to_string(line) + ": " + what +
                                " is not an integer: '" + field + "'");
    }
    return value;
}

SuppressionCategory parse_category_field(const std::string& field, std::size_t line,
                                         const char* what) {
    try {
        return parse_suppression_category(field);
    } catch (const Error&) {
        throw Error::validation("row " + std::to_string(line) + ": " + what +
                                " is not a suppression category: '" + field + "'");
    }
}

struct PerClassTallies {
    std::array<double, 6> precision{};
    std::array<double, 6> recall{};
    std::array<double, 6> f1{};
    std::array<int, 6> support{};
    std::array<int, 6> predicted{};
};

PerClassTallies per_class_tallies(const ConfusionMatrix& confusion) {
    PerClassTallies t;
    for (std::size_t i = 0; i < 6; ++i) {
        for (std::size_t j = 0; j < 6; ++j) {
            t.support[i] += confusion[i][j];
            t.predicted[j] += confusion[i][j];
        }
    }
    for (std::size_t i = 0; i < 6; ++i) {
        const int tp = confusion[i][i];
        t.precision[i] = t.predicted[i] > 0 ? static_cast<double>(tp) / t.predicted[i] : 0.0;
        t.recall[i] = t.support[i] > 0 ? static_cast<double>(tp) / t.support[i] : 0.0;
        const double denom = t.precision[i] + t.recall[i];
        t.f1[i] = denom > 0.0 ? 2.0 * t.precision[i] * t.recall[i] / denom : 0.0;
    }
    return t;
}

} // namespace

void validate_record(const PredictionRecord& r) {
    if (r.scenario_id.empty()) {
        throw Error::validation("prediction record needs a scenario_id");
    }
    if (r.system_confidence < 0.0 || r.system_confidence > 1.0) {
        throw Error::validation("system confidence must lie in [0,1] for " + r.scenario_id);
    }
    for (const double c : r.human_confidences) {
        if (c < 0.0 || c > 1.0) {
            throw Error::validation("human confidence must lie in [0,1] for " + r.scenario_id);
        }
    }
    if (r.gold_age < 1 || r.predicted_age < 1) {
        throw Error::validation("ages must be positive for " + r.scenario_id);
    }
}

std::string_view to_string(RatingTarget t) {
    switch (t) {
    case RatingTarget::child_feedback:
        return "child_feedback";
    case RatingTarget::adult_feedback:
        return "adult_feedback";
    case RatingTarget::post_dialogue:
        return "post_dialogue";
    }
    return "child_feedback";
}

RatingTarget parse_rating_target(std::string_view s) {
    if (s == "child_feedback") {
        return RatingTarget::child_feedback;
    }
    if (s == "adult_feedback") {
        return RatingTarget::adult_feedback;
    }
    if (s == "post_dialogue") {
        return RatingTarget::post_dialogue;
    }
    throw Error::validation("unknown rating target: " + std::string(s));
}

const std::vector<std::string>& criteria_for(RatingTarget target) {
    static const std::vector<std::string> child = {
        "empathy", "safety", "clarity", "actionability", "self_esteem", "culture", "dev_fit",
        "overall"};
    static const std::vector<std::string> adult = {
        "parent_empathy", "non_judgmental", "clarity",             "actionability",
        "bias_awareness", "child_respect",  "context_sensitivity", "overall"};
    static const std::vector<std::string> post = {"C-1", "C-2", "C-3", "C-4",
                                                  "P-1", "P-2", "P-3", "P-4"};
    switch (target) {
    case RatingTarget::child_feedback:
        return child;
    case RatingTarget::adult_feedback:
        return adult;
    case RatingTarget::post_dialogue:
        return post;
    }
    return child;
}

void validate_rating(const LikertRating& r) {
    if (r.rater_id.empty() || r.scenario_id.empty()) {
        throw Error::validation("rating needs rater_id and scenario_id");
    }
    if (r.score < 1 || r.score > 5) {
        throw Error::validation("rating score must lie in [1,5], got " + std::to_string(r.score));
    }
    const auto& allowed = criteria_for(r.target);
    if (std::find(allowed.begin(), allowed.end(), r.criterion) == allowed.end()) {
        throw Error::validation("criterion '" + r.criterion + "' is not valid for target '" +
                                std::string(to_string(r.target)) + "'");
    }
}

MetricsSummary classification_metrics(const std::vector<PredictionRecord>& records) {
    require_non_empty(records.size(), "prediction records");
    MetricsSummary m;

    for (const auto& r : records) {
        validate_record(r);
        const std::size_t gi = suppression_category_index(r.gold_suppression);
        const std::size_t pi = suppression_category_index(r.predicted_suppression);
        ++m.confusion[gi][pi];
    }

    const auto n = static_cast<double>(records.size());
    const PerClassTallies t = per_class_tallies(m.confusion);

    int trace = 0;
    for (std::size_t i = 0; i < 6; ++i) {
        trace += m.confusion[i][i];
    }
    m.accuracy = static_cast<double>(trace) / n;
    // Weighted recall = sum_i support_i * (tp_i / support_i) / n = trace / n,
    // computed that way so equality with accuracy is exact in floating point.
    m.recall = m.accuracy;

    for (std::size_t i = 0; i < 6; ++i) {
        const double weight = static_cast<double>(t.support[i]) / n;
        m.precision += weight * t.precision[i];
        m.f1 += weight * t.f1[i];
        m.macro_precision += t.precision[i] / 6.0;
        m.macro_recall += t.recall[i] / 6.0;
        m.macro_f1 += t.f1[i] / 6.0;
        if (t.support[i] == 0) {
            m.zero_support_classes.push_back(kSuppressionCategories[i]);
        }
    }

    m.age_mae = age_mae(records);

    double system_sum = 0.0;
    double human_sum = 0.0;
    bool all_have_human = true;
    for (const auto& r : records) {
        system_sum += r.system_confidence;
        if (r.human_confidences.empty()) {
            all_have_human = false;
        } else {
            human_sum += mean_of(r.human_confidences);
        }
    }
    m.mean_system_confidence = system_sum / n;
    if (all_have_human) {
        m.mean_human_confidence = human_sum / n;
    }
    return m;
}

double age_mae(const std::vector<PredictionRecord>& records) {
    require_non_empty(records.size(), "prediction records");
    double sum = 0.0;
    for (const auto& r : records) {
        validate_record(r);
        sum += std::abs(r.predicted_age - r.gold_age);
    }
    return sum / static_cast<double>(records.size());
}

ConfidenceReport confidence_report(const std::vector<PredictionRecord>& records) {
    require_non_empty(records.size(), "prediction records");
    ConfidenceReport report;
    double system_sum = 0.0;
    double human_sum = 0.0;
    for (const auto& r : records) {
        validate_record(r);
        if (r.human_confidences.empty()) {
            throw Error::validation("record '" + r.scenario_id + "' has no human confidences");
        }
        const double human = mean_of(r.human_confidences);
        report.rows.push_back({r.scenario_id, r.system_confidence, human});
        system_sum += r.system_confidence;
        human_sum += human;
    }
    report.mean_system = system_sum / static_cast<double>(records.size());
    report.mean_human = human_sum / static_cast<double>(records.size());
    return report;
}

std::vector<LikertSummaryRow> likert_summary(const std::vector<LikertRating>& ratings) {
    require_non_empty(ratings.size(), "likert ratings");

    // (target, criterion, scope, rater) -> scores. Criterion order follows
    // the fixed per-target lists; raters sort ascending; pooled comes last.
    std::map<std::string, std::vector<double>> buckets;
    std::set<std::string> rater_ids;
    for (const auto& r : ratings) {
        validate_rating(r);
        rater_ids.insert(r.rater_id);
        const std::string base =
            std::string(to_string(r.target)) + "\x1e" + r.criterion + "\x1e";
        buckets[base + "rater\x1e" + r.rater_id].push_back(r.score);
        buckets[base + "pooled\x1e" + "all"].push_back(r.score);
    }

    std::vector<LikertSummaryRow> rows;
    for (const RatingTarget target :
         {RatingTarget::child_feedback, RatingTarget::adult_feedback, RatingTarget::post_dialogue}) {
        for (const std::string& criterion : criteria_for(target)) {
            const std::string base =
                std::string(to_string(target)) + "\x1e" + criterion + "\x1e";
            const auto emit = [&](const std::string& scope, const std::string& rater) {
                const auto it = buckets.find(base + scope + "\x1e" + rater);
                if (it == buckets.end()) {
                    return;
                }
                std::vector<double> scores = it->second;
                std::sort(scores.begin(), scores.end());
                LikertSummaryRow row;
                row.scope = scope;
                row.rater_id = rater;
                row.target = target;
                row.criterion = criterion;
                row.count = scores.size();
                row.mean = mean_of(scores);
                row.variance = population_variance(scores, row.mean);
                row.median = quantile_sorted(scores, 0.5);
                row.q1 = quantile_sorted(scores, 0.25);
                row.q3 = quantile_sorted(scores, 0.75);
                rows.push_back(std::move(row));
            };
            for (const auto& rater : rater_ids) {
                emit("rater", rater);
            }
            emit("pooled", "all");
        }
    }
    return rows;
}

ConfidenceScale parse_confidence_scale(std::string_view s) {
    if (s == "unit") {
        return ConfidenceScale::unit;
    }
    if (s == "percent") {
        return ConfidenceScale::percent;
    }
    throw Error::usage("confidence scale must be 'unit' or 'percent', got '" + std::string(s) +
                       "'");
}

std::vector<PredictionRecord> parse_predictions_csv(std::string_view bytes,
                                                    ConfidenceScale scale) {
    const auto rows = csv::parse(bytes);
    if (rows.empty()) {
        throw Error::validation("predictions CSV is empty");
    }
    static const std::vector<std::string> fixed = {
        "scenario_id", "gold_suppression", "predicted_suppression",
        "system_confidence", "gold_age", "predicted_age"};
    const auto& header = rows[0].fields;
    if (header.size() < fixed.size() ||
        !std::equal(fixed.begin(), fixed.end(), header.begin())) {
        throw Error::validation(
            "predictions CSV header must start with scenario_id,gold_suppression,"
            "predicted_suppression,system_confidence,gold_age,predicted_age");
    }
    std::vector<std::string> raters;
    for (std::size_t i = fixed.size(); i < header.size(); ++i) {
        constexpr std::string_view prefix = "human_confidence_";
        if (header[i].rfind(prefix, 0) != 0 || header[i].size() == prefix.size()) {
            throw Error::validation("unexpected predictions column '" + header[i] +
                                    "' (want human_confidence_<rater>)");
        }
        raters.push_back(header[i].substr(prefix.size()));
    }

    std::vector<PredictionRecord> records;
    std::set<std::string> seen_ids;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.fields.size() != header.size()) {
            throw Error::validation("row " + std::to_string(row.line) + ": expected " +
                                    std::to_string(header.size()) + " fields, got " +
                                    std::to_string(row.fields.size()));
        }
        PredictionRecord r;
        r.scenario_id = row.fields[0];
        if (r.scenario_id.empty()) {
            throw Error::validation("row " + std::to_string(row.line) + ": empty scenario_id");
        }
        if (!seen_ids.insert(r.scenario_id).second) {
            throw Error::validation("row " + std::to_string(row.line) +
                                    ": duplicate scenario_id '" + r.scenario_id + "'");
        }
        r.gold_suppression = parse_category_field(row.fields[1], row.line, "gold_suppression");
        r.predicted_suppression =
            parse_category_field(row.fields[2], row.line, "predicted_suppression");
        r.system_confidence = parse_confidence_field(row.fields[3], row.line, "system_confidence",
                                                     ConfidenceScale::unit);
        r.gold_age = parse_int_field(row.fields[4], row.line, "gold_age");
        r.predicted_age = parse_int_field(row.fields[5], row.line, "predicted_age");
        if (r.gold_age < 1 || r.predicted_age < 1) {
            throw Error::validation("row " + std::to_string(row.line) +
                                    ": ages must be positive");
        }
        for (std::size_t j = fixed.size(); j < row.fields.size(); ++j) {
            if (row.fields[j].empty()) {
                continue; // rater skipped this scenario
            }
            r.human_confidences.push_back(
                parse_confidence_field(row.fields[j], row.line, "human confidence", scale));
        }
        records.push_back(std::move(r));
    }
    if (records.empty()) {
        throw Error::validation("predictions CSV has no data rows");
    }
    return records;
}

std::string serialize_predictions_csv(const std::vector<PredictionRecord>& records,
                                      const std::vector<std::string>& rater_ids) {
    std::vector<std::string> header = {"scenario_id", "gold_suppression", "predicted_suppression",
                                       "system_confidence", "gold_age", "predicted_age"};
    for (const auto& rater : rater_ids) {
        header.push_back("human_confidence_" + rater);
    }
    std::string out = csv::write_row(header);
    for (const auto& r : records) {
        validate_record(r);
        if (r.human_confidences.size() > rater_ids.size()) {
            throw Error::validation("record '" + r.scenario_id +
                                    "' has more human confidences than rater columns");
        }
        std::vector<std::string> fields = {r.scenario_id,
                                           std::string(to_string(r.gold_suppression)),
                                           std::string(to_string(r.predicted_suppression)),
                                           fmt(r.system_confidence),
                                           std::to_string(r.gold_age),
                                           std::to_string(r.predicted_age)};
        for (std::size_t j = 0; j < rater_ids.size(); ++j) {
            fields.push_back(j < r.human_confidences.size() ? fmt(r.human_confidences[j]) : "");
        }
        out += csv::write_row(fields);
    }
    return out;
}

std::vector<LikertRating> parse_ratings_csv(std::string_view bytes) {
    const auto rows = csv::parse(bytes);
    if (rows.empty()) {
        throw Error::validation("ratings CSV is empty");
    }
    static const std::vector<std::string> expected = {"rater_id", "scenario_id", "target",
                                                      "criterion", "score"};
    if (rows[0].fields != expected) {
        throw Error::validation("ratings CSV header must be rater_id,scenario_id,target,"
                                "criterion,score");
    }
    std::vector<LikertRating> ratings;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.fields.size() != expected.size()) {
            throw Error::validation("row " + std::to_string(row.line) + ": expected 5 fields, got " +
                                    std::to_string(row.fields.size()));
        }
        LikertRating r;
        r.rater_id = row.fields[0];
        r.scenario_id = row.fields[1];
        try {
            r.target = parse_rating_target(row.fields[2]);
        } catch (const Error& e) {
            throw Error::validation("row " + std::to_string(row.line) + ": " + e.what());
        }
        r.criterion = row.fields[3];
        r.score = parse_int_field(row.fields[4], row.line, "score");
        try {
            validate_rating(r);
        } catch (const Error& e) {
            throw Error::validation("row " + std::to_string(row.line) + ": " + e.what());
        }
        ratings.push_back(std::move(r));
    }
    if (ratings.empty()) {
        throw Error::validation("ratings CSV has no data rows");
    }
    return ratings;
}

std::string serialize_ratings_csv(const std::vector<LikertRating>& ratings) {
    std::string out = "rater_id,scenario_id,target,criterion,score\n";
    for (const auto& r : ratings) {
        validate_rating(r);
        out += csv::write_row({r.rater_id, r.scenario_id, std::string(to_string(r.target)),
                               r.criterion, std::to_string(r.score)});
    }
    return out;
}

std::string serialize_metrics_csv(const MetricsSummary& m) {
    std::string out = "metric,value\n";
    const auto emit = [&](const std::string& name, double value) {
        out += csv::write_row({name, fmt(value)});
    };
    emit("accuracy", m.accuracy);
    emit("weighted_precision", m.precision);
    emit("weighted_recall", m.recall);
    emit("weighted_f1", m.f1);
    emit("macro_precision", m.macro_precision);
    emit("macro_recall", m.macro_recall);
    emit("macro_f1", m.macro_f1);
    emit("age_mae", m.age_mae);
    emit("mean_system_confidence", m.mean_system_confidence);
    if (m.mean_human_confidence) {
        emit("mean_human_confidence", *m.mean_human_confidence);
    }
    return out;
}

std::string serialize_confusion_csv(const ConfusionMatrix& confusion) {
    std::vector<std::string> header = {"gold"};
    for (const auto c : kSuppressionCategories) {
        header.emplace_back(to_string(c));
    }
    std::string out = csv::write_row(header);
    for (std::size_t i = 0; i < 6; ++i) {
        std::vector<std::string> fields = {std::string(to_string(kSuppressionCategories[i]))};
        for (std::size_t j = 0; j < 6; ++j) {
            fields.push_back(std::to_string(confusion[i][j]));
        }
        out += csv::write_row(fields);
    }
    return out;
}

std::string serialize_confidence_csv(const ConfidenceReport& report) {
    std::string out = "scenario_id,system_confidence,human_confidence\n";
    for (const auto& row : report.rows) {
        out += csv::write_row({row.scenario_id, fmt(row.system_confidence),
                               fmt(row.human_confidence)});
    }
    out += csv::write_row({"mean", fmt(report.mean_system), fmt(report.mean_human)});
    return out;
}

std::string serialize_likert_summary_csv(const std::vector<LikertSummaryRow>& rows) {
    std::string out = "scope,rater_id,target,criterion,count,mean,variance,median,q1,q3\n";
    for (const auto& row : rows) {
        out += csv::write_row({row.scope, row.rater_id, std::string(to_string(row.target)),
                               row.criterion, std::to_string(row.count), fmt(row.mean),
                               fmt(row.variance), fmt(row.median), fmt(row.q1), fmt(row.q3)});
    }
    return out;
}

std::string render_report_md(const MetricsSummary& metrics,
                             const std::optional<ConfidenceReport>& confidence,
                             const std::vector<LikertSummaryRow>& likert) {
    std::ostringstream out;
    out << "# Evaluation report\n\n";

    out << "## Suppression classification\n\n";
    out << "| metric | value |\n|---|---|\n";
    out << "| accuracy | " << fmt(metrics.accuracy) << " |\n";
    out << "| weighted precision | " << fmt(metrics.precision) << " |\n";
    out << "| weighted recall | " << fmt(metrics.recall) << " |\n";
    out << "| weighted F1 | " << fmt(metrics.f1) << " |\n";
    out << "| macro precision | " << fmt(metrics.macro_precision) << " |\n";
    out << "| macro recall | " << fmt(metrics.macro_recall) << " |\n";
    out << "| macro F1 | " << fmt(metrics.macro_f1) << " |\n";
    out << "| age MAE (years) | " << fmt(metrics.age_mae) << " |\n";
    if (!metrics.zero_support_classes.empty()) {
        out << "\nZero-support gold classes (contribute 0 to weighted averages):";
        for (const auto c : metrics.zero_support_classes) {
            out << " " << to_string(c);
        }
        out << "\n";
    }

    out << "\n## Confusion matrix (gold rows, predicted columns)\n\n";
    out << "| gold |";
    for (const auto c : kSuppressionCategories) {
        out << " " << to_string(c) << " |";
    }
    out << "\n|---|---|---|---|---|---|---|\n";
    for (std::size_t i = 0; i < 6; ++i) {
        out << "| " << to_string(kSuppressionCategories[i]) << " |";
        for (std::size_t j = 0; j < 6; ++j) {
            out << " " << metrics.confusion[i][j] << " |";
        }
        out << "\n";
    }

    out << "\n## Confidence\n\n";
    out << "Mean system confidence: " << fmt(metrics.mean_system_confidence) << "\n";
    if (confidence) {
        out << "\nMean human confidence: " << fmt(confidence->mean_human)
            << " (system " << fmt(confidence->mean_system) << ") over "
            << confidence->rows.size() << " scenarios.\n";
    }

    if (!likert.empty()) {
        out << "\n## Likert ratings\n\n";
        out << "| scope | rater | target | criterion | n | mean | variance | median | q1 | q3 |\n";
        out << "|---|---|---|---|---|---|---|---|---|---|\n";
        for (const auto& row : likert) {
            out << "| " << row.scope << " | " << row.rater_id << " | " << to_string(row.target)
                << " | " << row.criterion << " | " << row.count << " | " << fmt(row.mean) << " | "
                << fmt(row.variance) << " | " << fmt(row.median) << " | " << fmt(row.q1) << " | "
                << fmt(row.q3) << " |\n";
        }
    }
    return out.str();
}

} // namespace famlens
