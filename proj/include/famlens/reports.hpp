// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "famlens/categories.hpp"
#include "famlens/scenario.hpp"

#include <string>
#include <string_view>
#include <variant>

namespace famlens {

/// Output of the suppressed-emotion detection agent.
struct SuppressionReport {
    int s = 1; // suppression intensity, 1..5
    SuppressionCategory suppression_type = SuppressionCategory::anxiety;
    std::string reason;
    double c = 0.0; // model confidence, [0,1]

    bool operator==(const SuppressionReport&) const = default;
};

/// Output of the attribute estimation agent.
struct AttributeReport {
    Gender gender = Gender::male;
    int age = 1; // child's estimated age in whole years
    std::string background;

    bool operator==(const AttributeReport&) const = default;
};

/// Output of the bias description agent. The description is free-form text
/// and may be hybrid across categories.
struct BiasReport {
    std::string bias_description;
    double c = 0.0;

    bool operator==(const BiasReport&) const = default;
};

void validate_report(const SuppressionReport& r);
void validate_report(const AttributeReport& r);
void validate_report(const BiasReport& r);

enum class Audience { child, adult };
std::string_view to_string(Audience a);
Audience parse_audience(std::string_view s);

/// Structured synthesis of detection outputs for one audience. The detection
/// fields are carried verbatim; only the summary is meta-agent-generated.
struct SituationReport {
    Audience audience = Audience::child;
    std::string scenario_id;
    std::string summary;
    std::variant<SuppressionReport, BiasReport> source_detection;
    AttributeReport attributes;

    bool operator==(const SituationReport&) const = default;
};

void validate_report(const SituationReport& r);

/// Deterministic plain-text rendering used for embeddings and prompts. The
/// scenario id is deliberately excluded: embedding similarity works on
/// content, not identifiers.
std::string render_report_text(const SituationReport& r);

/// Both audiences rendered together, the combined report handed to experts.
std::string render_report_pair_text(const SituationReport& child, const SituationReport& adult);

std::string serialize_report_json(const SituationReport& r);
SituationReport parse_report_json(std::string_view bytes);

} // namespace famlens
