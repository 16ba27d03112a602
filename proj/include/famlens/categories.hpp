// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace famlens {

/// The six suppressed-emotion categories. The listed order is canonical and
/// fixes confusion-matrix indexing everywhere.
enum class SuppressionCategory {
    anxiety,
    emotional,
    fear,
    social,
    behavioral,
    self_esteem,
};

inline constexpr std::array<SuppressionCategory, 6> kSuppressionCategories = {
    SuppressionCategory::anxiety,    SuppressionCategory::emotional,
    SuppressionCategory::fear,      SuppressionCategory::social,
    SuppressionCategory::behavioral, SuppressionCategory::self_esteem,
};

std::string_view to_string(SuppressionCategory c);
SuppressionCategory parse_suppression_category(std::string_view s);
std::size_t suppression_category_index(SuppressionCategory c);

/// The six ideal-parent-bias categories used to seed the bias-description
/// prompt. They never constrain the model's free-form output.
enum class BiasCategory {
    academic_excellence,
    gender_norms,
    social_comparison,
    self_replication,
    role_based_expectation,
    self_esteem_projection,
};

struct BiasCategoryInfo {
    BiasCategory category;
    std::string_view key;
    std::string_view display_name;
    std::vector<std::string_view> example_expressions;
};

const std::array<BiasCategoryInfo, 6>& bias_category_table();
std::string_view to_string(BiasCategory c);
BiasCategory parse_bias_category(std::string_view s);

/// One line per category, "Display Name: examples", for prompt construction.
std::string bias_category_prompt_block();

} // namespace famlens
