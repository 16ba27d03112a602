// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace famlens {

enum class Speaker { parent, child };

std::string_view to_string(Speaker s);
Speaker parse_speaker(std::string_view s);
Speaker other(Speaker s);

struct DialogueTurn {
    int index = 0; // 1-based utterance number
    Speaker speaker = Speaker::parent;
    std::string content;
    // Psychological annotation attached by the narrator; never a turn of its
    // own. When present it must be non-empty so the CSV round trip is exact.
    std::optional<std::string> narrator_note;

    bool operator==(const DialogueTurn&) const = default;
};

struct Dialogue {
    std::string scenario_id;
    std::vector<DialogueTurn> turns;
    std::string language_tag = "ja";

    bool operator==(const Dialogue&) const = default;
};

/// Enforces: indices are exactly 1..n, speakers strictly alternate, contents
/// non-empty, narrator notes non-empty when present.
void validate_dialogue(const Dialogue& d);

/// Parses the canonical dialogue CSV (`index,speaker,content,narrator_note`).
/// scenario_id is not stored in the CSV and is supplied by the caller,
/// typically from the file name.
Dialogue parse_dialogue_csv(std::string_view bytes, std::string scenario_id,
                            std::string language_tag = "ja");

/// Canonical, deterministic byte output: fixed header, rows in index order,
/// minimal RFC-4180 quoting, LF line endings.
std::string serialize_dialogue_csv(const Dialogue& d);

/// Plain-text rendering used inside prompts ("1. parent: ...").
std::string render_dialogue_text(const Dialogue& d);

inline constexpr std::string_view kDialogueCsvHeader = "index,speaker,content,narrator_note";

} // namespace famlens
