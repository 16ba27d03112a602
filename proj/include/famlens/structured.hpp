// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "famlens/backend.hpp"
#include "famlens/error.hpp"

#include <stdexcept>
#include <string>

namespace famlens {

/// Raised by response parsers when the model output violates the expected
/// structure or an invariant. Triggers a repair re-ask, not a hard failure.
struct OutputViolation : std::runtime_error {
    explicit OutputViolation(const std::string& what) : std::runtime_error(what) {}
};

/// Extracts the first balanced JSON object from raw model output, tolerating
/// surrounding prose and markdown code fences. Throws OutputViolation when no
/// complete object is present.
std::string extract_json_object(const std::string& raw);

template <typename T>
struct StructuredOutputEnvelope {
    T value;
    std::string raw;
    int repair_attempts = 0;
};

/// Asks for a structured reply and re-asks on violations. Each repair appends
/// the bad reply and a correction request to the conversation, so the total
/// number of provider calls is at most max_repairs + 1. Exhausting repairs is
/// a validation error carrying the stage tag and the last violation.
template <typename Parser>
auto request_structured(ChatProvider& provider, ChatRequest req, Parser&& parse, int max_repairs)
    -> StructuredOutputEnvelope<decltype(parse(std::string{}))> {
    if (max_repairs < 0) {
        throw Error::config("max_repairs must be non-negative");
    }
    std::string last_violation;
    for (int attempt = 0; attempt <= max_repairs; ++attempt) {
        const std::string raw = chat_complete(provider, req);
        try {
            return {parse(raw), raw, attempt};
        } catch (const OutputViolation& violation) {
            last_violation = violation.what();
            req.messages.push_back({ChatMessage::Role::assistant, raw});
            req.messages.push_back(
                {ChatMessage::Role::user,
                 "Your previous reply was invalid: " + last_violation +
                     ". Reply again with only the corrected JSON object and no other text."});
        }
    }
    throw Error::validation("stage '" + req.tag + "' produced invalid output after " +
                            std::to_string(max_repairs + 1) + " attempts: " + last_violation);
}

} // namespace famlens
