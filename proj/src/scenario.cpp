// SPDX-License-Identifier: Apache-2.0
#include "famlens/scenario.hpp"

#include "famlens/error.hpp"

#include <json.hpp>

namespace famlens {

using nlohmann::json;

std::string_view to_string(Gender g) {
    return g == Gender::male ? "male" : "female";
}

Gender parse_gender(std::string_view s) {
    if (s == "male") return Gender::male;
    if (s == "female") return Gender::female;
    throw Error::validation("unknown gender: \"" + std::string(s) + "\"");
}

std::string topic_text(const Topic& t) {
    switch (t.kind) {
    case Topic::Kind::play: return "play";
    case Topic::Kind::study: return "study";
    case Topic::Kind::future_plans: return "future_plans";
    case Topic::Kind::other: return t.other_text;
    }
    return "";
}

void validate_scenario_metadata(const ScenarioMetadata& m) {
    if (m.scenario_id.empty()) {
        throw Error::validation("scenario metadata: scenario_id must not be empty");
    }
    if (m.topic.kind == Topic::Kind::other && m.topic.other_text.empty()) {
        throw Error::validation("scenario " + m.scenario_id + ": topic \"other\" requires a text");
    }
    if (m.child_persona.age < 1) {
        throw Error::validation("scenario " + m.scenario_id + ": child age must be a positive integer");
    }
    if (m.bias.strength < 1 || m.bias.strength > 5) {
        throw Error::validation("scenario " + m.scenario_id + ": bias strength " +
                                std::to_string(m.bias.strength) + " outside [1,5]");
    }
    if (m.suppression.present) {
        if (!m.suppression.category || !m.suppression.strength) {
            throw Error::validation("scenario " + m.scenario_id +
                                    ": suppression present but category/strength missing");
        }
        if (*m.suppression.strength < 1 || *m.suppression.strength > 5) {
            throw Error::validation("scenario " + m.scenario_id + ": suppression strength " +
                                    std::to_string(*m.suppression.strength) + " outside [1,5]");
        }
    } else if (m.suppression.category || m.suppression.strength) {
        throw Error::validation("scenario " + m.scenario_id +
                                ": suppression absent but category/strength set");
    }
}

namespace {

const json& require(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        throw Error::validation("scenario metadata: missing field \"" + std::string(key) + "\" in " + where);
    }
    return *it;
}

std::string require_string(const json& obj, const char* key, const std::string& where) {
    const json& v = require(obj, key, where);
    if (!v.is_string()) {
        throw Error::validation("scenario metadata: field \"" + std::string(key) + "\" in " + where +
                                " must be a string");
    }
    return v.get<std::string>();
}

int require_int(const json& obj, const char* key, const std::string& where) {
    const json& v = require(obj, key, where);
    if (!v.is_number_integer()) {
        throw Error::validation("scenario metadata: field \"" + std::string(key) + "\" in " + where +
                                " must be an integer");
    }
    return v.get<int>();
}

Topic parse_topic(const json& v) {
    Topic t;
    if (v.is_string()) {
        std::string s = v.get<std::string>();
        if (s == "play") t.kind = Topic::Kind::play;
        else if (s == "study") t.kind = Topic::Kind::study;
        else if (s == "future_plans") t.kind = Topic::Kind::future_plans;
        else throw Error::validation("scenario metadata: unknown topic \"" + s + "\"");
        return t;
    }
    if (v.is_object() && v.contains("other") && v["other"].is_string()) {
        t.kind = Topic::Kind::other;
        t.other_text = v["other"].get<std::string>();
        return t;
    }
    throw Error::validation("scenario metadata: topic must be a known string or {\"other\": text}");
}

} // namespace

ScenarioMetadata load_scenario_metadata(std::string_view bytes) {
    json doc;
    try {
        doc = json::parse(bytes);
    } catch (const json::exception& e) {
        throw Error::validation(std::string("scenario metadata: invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) {
        throw Error::validation("scenario metadata: document must be a JSON object");
    }

    ScenarioMetadata m;
    m.scenario_id = require_string(doc, "scenario_id", "document");
    m.topic = parse_topic(require(doc, "topic", "document"));

    const json& child = require(doc, "child_persona", "document");
    m.child_persona.age = require_int(child, "age", "child_persona");
    m.child_persona.personality = require_string(child, "personality", "child_persona");

    const json& parent = require(doc, "parent_persona", "document");
    m.parent_persona.gender = parse_gender(require_string(parent, "gender", "parent_persona"));
    m.parent_persona.upbringing_background =
        require_string(parent, "upbringing_background", "parent_persona");

    const json& bias = require(doc, "bias", "document");
    m.bias.category = parse_bias_category(require_string(bias, "category", "bias"));
    m.bias.strength = require_int(bias, "strength", "bias");
    m.bias.formation_background = require_string(bias, "formation_background", "bias");

    const json& sup = require(doc, "suppression", "document");
    const json& present = require(sup, "present", "suppression");
    if (!present.is_boolean()) {
        throw Error::validation("scenario metadata: suppression.present must be a boolean");
    }
    m.suppression.present = present.get<bool>();
    if (sup.contains("category")) {
        m.suppression.category = parse_suppression_category(sup["category"].get<std::string>());
    }
    if (sup.contains("strength")) {
        if (!sup["strength"].is_number_integer()) {
            throw Error::validation("scenario metadata: suppression.strength must be an integer");
        }
        m.suppression.strength = sup["strength"].get<int>();
    }

    m.starter = parse_speaker(require_string(doc, "starter", "document"));

    validate_scenario_metadata(m);
    return m;
}

std::string serialize_scenario_metadata(const ScenarioMetadata& m) {
    validate_scenario_metadata(m);
    json doc;
    doc["scenario_id"] = m.scenario_id;
    if (m.topic.kind == Topic::Kind::other) {
        doc["topic"] = json{{"other", m.topic.other_text}};
    } else {
        doc["topic"] = topic_text(m.topic);
    }
    doc["child_persona"] = {{"age", m.child_persona.age}, {"personality", m.child_persona.personality}};
    doc["parent_persona"] = {{"gender", std::string(to_string(m.parent_persona.gender))},
                             {"upbringing_background", m.parent_persona.upbringing_background}};
    doc["bias"] = {{"category", std::string(to_string(m.bias.category))},
                   {"strength", m.bias.strength},
                   {"formation_background", m.bias.formation_background}};
    if (m.suppression.present) {
        doc["suppression"] = {{"present", true},
                              {"category", std::string(to_string(*m.suppression.category))},
                              {"strength", *m.suppression.strength}};
    } else {
        doc["suppression"] = {{"present", false}};
    }
    doc["starter"] = std::string(to_string(m.starter));
    return doc.dump(2) + "\n";
}

} // namespace famlens
