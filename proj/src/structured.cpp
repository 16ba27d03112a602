// SPDX-License-Identifier: Apache-2.0
#include "famlens/structured.hpp"

namespace famlens {

std::string extract_json_object(const std::string& raw) {
    const auto open = raw.find('{');
    if (open == std::string::npos) {
        throw OutputViolation("reply contains no JSON object");
    }
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    for (std::size_t i = open; i < raw.size(); ++i) {
        const char c = raw[i];
        if (in_string) {
            if (escaped) {
                escaped = false;
            } else if (c == '\\') {
                escaped = true;
            } else if (c == '"') {
                in_string = false;
            }
            continue;
        }
        if (c == '"') {
            in_string = true;
        } else if (c == '{') {
            ++depth;
        } else if (c == '}') {
            --depth;
            if (depth == 0) {
                return raw.substr(open, i - open + 1);
            }
        }
    }
    throw OutputViolation("reply has an unbalanced JSON object");
}

} // namespace famlens
