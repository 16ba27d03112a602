// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "famlens/categories.hpp"
#include "famlens/dialogue.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace famlens {

enum class Gender { male, female };
std::string_view to_string(Gender g);
Gender parse_gender(std::string_view s);

struct Topic {
    enum class Kind { play, study, future_plans, other };
    Kind kind = Kind::play;
    std::string other_text; // set iff kind == other

    bool operator==(const Topic&) const = default;
};

std::string topic_text(const Topic& t);

struct ChildPersona {
    int age = 0; // whole years, >= 1
    std::string personality;

    bool operator==(const ChildPersona&) const = default;
};

struct ParentPersona {
    Gender gender = Gender::male;
    std::string upbringing_background;

    bool operator==(const ParentPersona&) const = default;
};

struct BiasSpec {
    BiasCategory category = BiasCategory::academic_excellence;
    int strength = 1; // 1..5
    std::string formation_background;

    bool operator==(const BiasSpec&) const = default;
};

struct SuppressionSpec {
    bool present = false;
    std::optional<SuppressionCategory> category; // present iff `present`
    std::optional<int> strength;                 // present iff `present`, 1..5

    bool operator==(const SuppressionSpec&) const = default;
};

struct ScenarioMetadata {
    std::string scenario_id;
    Topic topic;
    ChildPersona child_persona;
    ParentPersona parent_persona;
    BiasSpec bias;
    SuppressionSpec suppression;
    Speaker starter = Speaker::parent;

    bool operator==(const ScenarioMetadata&) const = default;
};

void validate_scenario_metadata(const ScenarioMetadata& m);

/// Parses the `.meta` JSON document stored beside each dialogue CSV.
ScenarioMetadata load_scenario_metadata(std::string_view bytes);

/// Canonical JSON serialization (stable key order, trailing newline).
std::string serialize_scenario_metadata(const ScenarioMetadata& m);

} // namespace famlens
