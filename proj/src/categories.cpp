// SPDX-License-Identifier: Apache-2.0
#include "famlens/categories.hpp"

#include "famlens/error.hpp"

namespace famlens {

std::string_view to_string(SuppressionCategory c) {
    switch (c) {
    case SuppressionCategory::anxiety: return "anxiety";
    case SuppressionCategory::emotional: return "emotional";
    case SuppressionCategory::fear: return "fear";
    case SuppressionCategory::social: return "social";
    case SuppressionCategory::behavioral: return "behavioral";
    case SuppressionCategory::self_esteem: return "self_esteem";
    }
    return "?";
}

SuppressionCategory parse_suppression_category(std::string_view s) {
    for (auto c : kSuppressionCategories) {
        if (s == to_string(c)) return c;
    }
    throw Error::validation("unknown suppression category: \"" + std::string(s) + "\"");
}

std::size_t suppression_category_index(SuppressionCategory c) {
    for (std::size_t i = 0; i < kSuppressionCategories.size(); ++i) {
        if (kSuppressionCategories[i] == c) return i;
    }
    return 0;
}

const std::array<BiasCategoryInfo, 6>& bias_category_table() {
    static const std::array<BiasCategoryInfo, 6> table = {{
        {BiasCategory::academic_excellence, "academic_excellence", "Academic Excellence",
         {"You have to get good grades", "You must study harder"}},
        {BiasCategory::gender_norms, "gender_norms", "Gender Norms",
         {"Boys shouldn't cry", "Girls should be more considerate"}},
        {BiasCategory::social_comparison, "social_comparison", "Social Comparison",
         {"Why can't you be like your sibling?", "comparisons with peers"}},
        {BiasCategory::self_replication, "self_replication", "Self-replication",
         {"When I was your age...", "references to the parent's own values"}},
        {BiasCategory::role_based_expectation, "role_based_expectation", "Role-based Expectation",
         {"As a big brother/sister, you should...", "expectations based on roles"}},
        {BiasCategory::self_esteem_projection, "self_esteem_projection", "Self-esteem Projection",
         {"You're embarrassing me", "projecting status-based concerns"}},
    }};
    return table;
}

std::string_view to_string(BiasCategory c) {
    for (const auto& info : bias_category_table()) {
        if (info.category == c) return info.key;
    }
    return "?";
}

BiasCategory parse_bias_category(std::string_view s) {
    for (const auto& info : bias_category_table()) {
        if (s == info.key) return info.category;
    }
    throw Error::validation("unknown bias category: \"" + std::string(s) + "\"");
}

std::string bias_category_prompt_block() {
    std::string out;
    for (const auto& info : bias_category_table()) {
        out += "- ";
        out += info.display_name;
        out += ": ";
        for (std::size_t i = 0; i < info.example_expressions.size(); ++i) {
            if (i > 0) out += "; ";
            out.push_back('"');
            out += info.example_expressions[i];
            out.push_back('"');
        }
        out.push_back('\n');
    }
    return out;
}

} // namespace famlens
