// SPDX-License-Identifier: Apache-2.0
#include "famlens/reports.hpp"

#include "famlens/error.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>

namespace famlens {

using nlohmann::json;

namespace {

void check_confidence(double c, const char* what) {
    if (!(c >= 0.0 && c <= 1.0)) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%g", c);
        throw Error::validation(std::string(what) + ": confidence " + buf + " outside [0,1]");
    }
}

std::string format_confidence(double c) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", c);
    return buf;
}

} // namespace

void validate_report(const SuppressionReport& r) {
    if (r.s < 1 || r.s > 5) {
        throw Error::validation("suppression report: intensity s=" + std::to_string(r.s) +
                                " outside [1,5]");
    }
    check_confidence(r.c, "suppression report");
    if (r.reason.empty()) {
        throw Error::validation("suppression report: reason must not be empty");
    }
}

void validate_report(const AttributeReport& r) {
    if (r.age < 1) {
        throw Error::validation("attribute report: age must be a positive integer");
    }
    if (r.background.empty()) {
        throw Error::validation("attribute report: background must not be empty");
    }
}

void validate_report(const BiasReport& r) {
    if (r.bias_description.empty()) {
        throw Error::validation("bias report: bias_description must not be empty");
    }
    check_confidence(r.c, "bias report");
}

std::string_view to_string(Audience a) {
    return a == Audience::child ? "child" : "adult";
}

Audience parse_audience(std::string_view s) {
    if (s == "child") return Audience::child;
    if (s == "adult") return Audience::adult;
    throw Error::validation("unknown audience: \"" + std::string(s) + "\"");
}

void validate_report(const SituationReport& r) {
    if (r.scenario_id.empty()) {
        throw Error::validation("situation report: scenario_id must not be empty");
    }
    if (r.summary.empty()) {
        throw Error::validation("situation report: summary must not be empty");
    }
    bool holds_suppression = std::holds_alternative<SuppressionReport>(r.source_detection);
    if (r.audience == Audience::child && !holds_suppression) {
        throw Error::validation("situation report: child audience requires a suppression source");
    }
    if (r.audience == Audience::adult && holds_suppression) {
        throw Error::validation("situation report: adult audience requires a bias source");
    }
    if (holds_suppression) {
        validate_report(std::get<SuppressionReport>(r.source_detection));
    } else {
        validate_report(std::get<BiasReport>(r.source_detection));
    }
    validate_report(r.attributes);
}

std::string render_report_text(const SituationReport& r) {
    std::string out;
    out += "Audience: ";
    out += to_string(r.audience);
    out += "\nSummary: " + r.summary + "\n";
    if (const auto* sup = std::get_if<SuppressionReport>(&r.source_detection)) {
        out += "Suppression: type=" + std::string(to_string(sup->suppression_type)) +
               " intensity=" + std::to_string(sup->s) + " confidence=" + format_confidence(sup->c) + "\n";
        out += "Reason: " + sup->reason + "\n";
    } else {
        const auto& bias = std::get<BiasReport>(r.source_detection);
        out += "Bias: confidence=" + format_confidence(bias.c) + "\n";
        out += "Description: " + bias.bias_description + "\n";
    }
    out += "Child attributes: gender=" + std::string(to_string(r.attributes.gender)) +
           " age=" + std::to_string(r.attributes.age) + "\n";
    out += "Family background: " + r.attributes.background + "\n";
    return out;
}

std::string render_report_pair_text(const SituationReport& child, const SituationReport& adult) {
    return render_report_text(child) + "\n---\n" + render_report_text(adult);
}

std::string serialize_report_json(const SituationReport& r) {
    validate_report(r);
    json doc;
    doc["audience"] = std::string(to_string(r.audience));
    doc["scenario_id"] = r.scenario_id;
    doc["summary"] = r.summary;
    doc["attributes"] = {{"gender", std::string(to_string(r.attributes.gender))},
                         {"age", r.attributes.age},
                         {"background", r.attributes.background}};
    if (const auto* sup = std::get_if<SuppressionReport>(&r.source_detection)) {
        doc["source_detection"] = {{"kind", "suppression"},
                                   {"s", sup->s},
                                   {"suppression_type", std::string(to_string(sup->suppression_type))},
                                   {"reason", sup->reason},
                                   {"c", sup->c}};
    } else {
        const auto& bias = std::get<BiasReport>(r.source_detection);
        doc["source_detection"] = {{"kind", "bias"},
                                   {"bias_description", bias.bias_description},
                                   {"c", bias.c}};
    }
    return doc.dump(2) + "\n";
}

SituationReport parse_report_json(std::string_view bytes) {
    json doc;
    try {
        doc = json::parse(bytes);
    } catch (const json::exception& e) {
        throw Error::validation(std::string("situation report: invalid JSON: ") + e.what());
    }
    try {
        SituationReport r;
        r.audience = parse_audience(doc.at("audience").get<std::string>());
        r.scenario_id = doc.at("scenario_id").get<std::string>();
        r.summary = doc.at("summary").get<std::string>();
        const json& attrs = doc.at("attributes");
        r.attributes.gender = parse_gender(attrs.at("gender").get<std::string>());
        r.attributes.age = attrs.at("age").get<int>();
        r.attributes.background = attrs.at("background").get<std::string>();
        const json& src = doc.at("source_detection");
        std::string kind = src.at("kind").get<std::string>();
        if (kind == "suppression") {
            SuppressionReport sup;
            sup.s = src.at("s").get<int>();
            sup.suppression_type = parse_suppression_category(src.at("suppression_type").get<std::string>());
            sup.reason = src.at("reason").get<std::string>();
            sup.c = src.at("c").get<double>();
            r.source_detection = sup;
        } else if (kind == "bias") {
            BiasReport bias;
            bias.bias_description = src.at("bias_description").get<std::string>();
            bias.c = src.at("c").get<double>();
            r.source_detection = bias;
        } else {
            throw Error::validation("situation report: unknown source_detection kind \"" + kind + "\"");
        }
        validate_report(r);
        return r;
    } catch (const json::exception& e) {
        throw Error::validation(std::string("situation report: malformed document: ") + e.what());
    }
}

} // namespace famlens
