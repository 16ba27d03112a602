// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "famlens/agents.hpp"
#include "famlens/dialogue.hpp"
#include "famlens/reports.hpp"

namespace famlens {

/// Counselor agent: suppression intensity, category, reason, confidence.
SuppressionReport detect_suppression(const AgentContext& ctx, const Dialogue& d);

/// Auxiliary agent: the child's gender, age in whole years, and background.
AttributeReport estimate_attributes(const AgentContext& ctx, const Dialogue& d);

/// Bias agent: free-form description of ideal-parent expectations. The
/// rendered prompt seeds all six bias categories with example expressions.
BiasReport describe_bias(const AgentContext& ctx, const Dialogue& d);

/// Meta-agent composition for the child audience. Detection fields are
/// carried verbatim; only the summary is generated.
SituationReport compose_child_report(const AgentContext& ctx, const Dialogue& d,
                                     const SuppressionReport& o_sup, const AttributeReport& o_attr);

/// Meta-agent composition for the adult audience; mirrors the child side.
SituationReport compose_adult_report(const AgentContext& ctx, const Dialogue& d,
                                     const BiasReport& o_bias, const AttributeReport& o_attr);

struct AnalysisResult {
    SituationReport child;
    SituationReport adult;

    bool operator==(const AnalysisResult&) const = default;
};

/// Runs the three detection agents (concurrently up to the cap), then the two
/// compositions. Output is independent of scheduling; a failing stage is
/// reported with its stage name.
AnalysisResult analyze(const AgentContext& ctx, const Dialogue& d);

} // namespace famlens
