// SPDX-License-Identifier: Apache-2.0
#include "famlens/detection.hpp"

#include "famlens/error.hpp"
#include "famlens/structured.hpp"

#include <nlohmann/json.hpp>

#include <sstream>

namespace famlens {

namespace {

using nlohmann::json;

json parse_reply_object(const std::string& raw) {
    const std::string body = extract_json_object(raw);
    json parsed = json::parse(body, nullptr, false);
    if (parsed.is_discarded() || !parsed.is_object()) {
        throw OutputViolation("reply is not a parseable JSON object");
    }
    return parsed;
}

const json& require_field(const json& obj, const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end()) {
        throw OutputViolation(std::string("missing field '") + key + "'");
    }
    return *it;
}

std::string require_text(const json& obj, const char* key) {
    const json& v = require_field(obj, key);
    if (!v.is_string() || v.get<std::string>().empty()) {
        throw OutputViolation(std::string("field '") + key + "' must be non-empty text");
    }
    return v.get<std::string>();
}

int require_int(const json& obj, const char* key) {
    const json& v = require_field(obj, key);
    if (!v.is_number_integer()) {
        throw OutputViolation(std::string("field '") + key + "' must be an integer");
    }
    return v.get<int>();
}

double require_number(const json& obj, const char* key) {
    const json& v = require_field(obj, key);
    if (!v.is_number()) {
        throw OutputViolation(std::string("field '") + key + "' must be a number");
    }
    return v.get<double>();
}

std::string suppression_category_list() {
    std::string out;
    for (const auto c : kSuppressionCategories) {
        if (!out.empty()) {
            out += ", ";
        }
        out += to_string(c);
    }
    return out;
}

SuppressionReport parse_suppression_reply(const std::string& raw) {
    const json obj = parse_reply_object(raw);
    SuppressionReport report;
    report.s = require_int(obj, "s");
    if (report.s < 1 || report.s > 5) {
        throw OutputViolation("field 's' must lie in [1,5]");
    }
    const std::string category = require_text(obj, "suppression_type");
    try {
        report.suppression_type = parse_suppression_category(category);
    } catch (const Error&) {
        throw OutputViolation("field 'suppression_type' must be one of: " +
                              suppression_category_list());
    }
    report.reason = require_text(obj, "reason");
    report.c = require_number(obj, "c");
    if (report.c < 0.0 || report.c > 1.0) {
        throw OutputViolation("field 'c' must lie in [0,1]");
    }
    return report;
}

AttributeReport parse_attribute_reply(const std::string& raw) {
    const json obj = parse_reply_object(raw);
    AttributeReport report;
    const std::string gender = require_text(obj, "gender");
    try {
        report.gender = parse_gender(gender);
    } catch (const Error&) {
        throw OutputViolation("field 'gender' must be 'male' or 'female'");
    }
    report.age = require_int(obj, "age");
    if (report.age < 1) {
        throw OutputViolation("field 'age' must be a positive number of years");
    }
    report.background = require_text(obj, "background");
    return report;
}

BiasReport parse_bias_reply(const std::string& raw) {
    const json obj = parse_reply_object(raw);
    BiasReport report;
    report.bias_description = require_text(obj, "bias_description");
    report.c = require_number(obj, "c");
    if (report.c < 0.0 || report.c > 1.0) {
        throw OutputViolation("field 'c' must lie in [0,1]");
    }
    return report;
}

std::string render_suppression_block(const SuppressionReport& r) {
    std::ostringstream out;
    out << "intensity (1-5): " << r.s << "\n"
        << "category: " << to_string(r.suppression_type) << "\n"
        << "reason: " << r.reason << "\n"
        << "confidence: " << r.c;
    return out.str();
}

std::string render_bias_block(const BiasReport& r) {
    std::ostringstream out;
    out << "description: " << r.bias_description << "\n"
        << "confidence: " << r.c;
    return out.str();
}

std::string render_attribute_block(const AttributeReport& r) {
    std::ostringstream out;
    out << "gender: " << to_string(r.gender) << "\n"
        << "age: " << r.age << "\n"
        << "background: " << r.background;
    return out.str();
}

std::string compose_summary(const AgentContext& ctx, const std::string& template_name,
                            const std::map<std::string, std::string>& vars) {
    const ChatRequest req = ctx.prompts.make_request(template_name, vars);
    return chat_complete(ctx.chat, req);
}

/// Reraises a stage failure with the stage name attached, preserving kind.
template <typename Fn>
auto run_stage(const char* stage, Fn&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        throw Error(e.kind(), std::string("stage '") + stage + "': " + e.what());
    }
}

} // namespace

SuppressionReport detect_suppression(const AgentContext& ctx, const Dialogue& d) {
    validate_dialogue(d);
    ChatRequest req = ctx.prompts.make_request(
        "detect_suppression",
        {{"dialogue", render_dialogue_text(d)}, {"categories", suppression_category_list()}});
    const auto envelope =
        request_structured(ctx.chat, std::move(req), parse_suppression_reply, ctx.max_repairs);
    validate_report(envelope.value);
    return envelope.value;
}

AttributeReport estimate_attributes(const AgentContext& ctx, const Dialogue& d) {
    validate_dialogue(d);
    ChatRequest req =
        ctx.prompts.make_request("estimate_attributes", {{"dialogue", render_dialogue_text(d)}});
    const auto envelope =
        request_structured(ctx.chat, std::move(req), parse_attribute_reply, ctx.max_repairs);
    validate_report(envelope.value);
    return envelope.value;
}

BiasReport describe_bias(const AgentContext& ctx, const Dialogue& d) {
    validate_dialogue(d);
    ChatRequest req = ctx.prompts.make_request(
        "describe_bias",
        {{"dialogue", render_dialogue_text(d)}, {"bias_categories", bias_category_prompt_block()}});
    const auto envelope =
        request_structured(ctx.chat, std::move(req), parse_bias_reply, ctx.max_repairs);
    validate_report(envelope.value);
    return envelope.value;
}

SituationReport compose_child_report(const AgentContext& ctx, const Dialogue& d,
                                     const SuppressionReport& o_sup, const AttributeReport& o_attr) {
    validate_dialogue(d);
    validate_report(o_sup);
    validate_report(o_attr);
    SituationReport report;
    report.audience = Audience::child;
    report.scenario_id = d.scenario_id;
    report.summary = compose_summary(ctx, "compose_child_report",
                                     {{"dialogue", render_dialogue_text(d)},
                                      {"suppression", render_suppression_block(o_sup)},
                                      {"attributes", render_attribute_block(o_attr)}});
    report.source_detection = o_sup;
    report.attributes = o_attr;
    validate_report(report);
    return report;
}

SituationReport compose_adult_report(const AgentContext& ctx, const Dialogue& d,
                                     const BiasReport& o_bias, const AttributeReport& o_attr) {
    validate_dialogue(d);
    validate_report(o_bias);
    validate_report(o_attr);
    SituationReport report;
    report.audience = Audience::adult;
    report.scenario_id = d.scenario_id;
    report.summary = compose_summary(ctx, "compose_adult_report",
                                     {{"dialogue", render_dialogue_text(d)},
                                      {"bias", render_bias_block(o_bias)},
                                      {"attributes", render_attribute_block(o_attr)}});
    report.source_detection = o_bias;
    report.attributes = o_attr;
    validate_report(report);
    return report;
}

AnalysisResult analyze(const AgentContext& ctx, const Dialogue& d) {
    validate_dialogue(d);

    SuppressionReport o_sup;
    AttributeReport o_attr;
    BiasReport o_bias;

    // The three detections are independent; run them under the cap. Slots are
    // index-addressed, so the result is schedule-independent.
    parallel_for(3, ctx.concurrency_cap, [&](std::size_t i) {
        switch (i) {
        case 0:
            o_sup = run_stage("detect_suppression", [&] { return detect_suppression(ctx, d); });
            break;
        case 1:
            o_attr = run_stage("estimate_attributes", [&] { return estimate_attributes(ctx, d); });
            break;
        default:
            o_bias = run_stage("describe_bias", [&] { return describe_bias(ctx, d); });
            break;
        }
    });

    AnalysisResult result;
    result.child = run_stage("compose_child_report",
                             [&] { return compose_child_report(ctx, d, o_sup, o_attr); });
    result.adult = run_stage("compose_adult_report",
                             [&] { return compose_adult_report(ctx, d, o_bias, o_attr); });
    return result;
}

} // namespace famlens
