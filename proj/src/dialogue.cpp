// SPDX-License-Identifier: Apache-2.0
#include "famlens/dialogue.hpp"

#include "famlens/csv.hpp"
#include "famlens/error.hpp"

#include <charconv>

namespace famlens {

std::string_view to_string(Speaker s) {
    return s == Speaker::parent ? "parent" : "child";
}

Speaker parse_speaker(std::string_view s) {
    if (s == "parent") return Speaker::parent;
    if (s == "child") return Speaker::child;
    throw Error::validation("unknown speaker label: \"" + std::string(s) + "\"");
}

Speaker other(Speaker s) {
    return s == Speaker::parent ? Speaker::child : Speaker::parent;
}

void validate_dialogue(const Dialogue& d) {
    if (d.scenario_id.empty()) {
        throw Error::validation("dialogue: scenario_id must not be empty");
    }
    for (std::size_t i = 0; i < d.turns.size(); ++i) {
        const auto& t = d.turns[i];
        if (t.index != static_cast<int>(i) + 1) {
            throw Error::validation("dialogue " + d.scenario_id + ": turn indices must be consecutive from 1, found " +
                                    std::to_string(t.index) + " at position " + std::to_string(i + 1));
        }
        if (t.content.empty()) {
            throw Error::validation("dialogue " + d.scenario_id + ": turn " + std::to_string(t.index) +
                                    " has empty content");
        }
        if (t.narrator_note && t.narrator_note->empty()) {
            throw Error::validation("dialogue " + d.scenario_id + ": turn " + std::to_string(t.index) +
                                    " has an empty narrator note");
        }
        if (i > 0 && t.speaker == d.turns[i - 1].speaker) {
            throw Error::validation("dialogue " + d.scenario_id + ": speakers must alternate, turn " +
                                    std::to_string(t.index) + " repeats " + std::string(to_string(t.speaker)));
        }
    }
}

namespace {

int parse_turn_index(const std::string& s, std::size_t line) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size() || value < 1) {
        throw Error::validation("dialogue csv: invalid turn index \"" + s + "\" at line " +
                                std::to_string(line));
    }
    return value;
}

} // namespace

Dialogue parse_dialogue_csv(std::string_view bytes, std::string scenario_id,
                            std::string language_tag) {
    auto rows = csv::parse(bytes);
    if (rows.empty()) {
        throw Error::validation("dialogue csv: missing header row");
    }
    const auto& header = rows.front().fields;
    static const std::vector<std::string> expected = {"index", "speaker", "content", "narrator_note"};
    if (header != expected) {
        throw Error::validation("dialogue csv: header must be exactly \"" +
                                std::string(kDialogueCsvHeader) + "\"");
    }

    Dialogue d;
    d.scenario_id = std::move(scenario_id);
    d.language_tag = std::move(language_tag);
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.fields.size() != 4) {
            throw Error::validation("dialogue csv: expected 4 columns at line " +
                                    std::to_string(row.line) + ", found " +
                                    std::to_string(row.fields.size()));
        }
        DialogueTurn t;
        t.index = parse_turn_index(row.fields[0], row.line);
        t.speaker = parse_speaker(row.fields[1]);
        t.content = row.fields[2];
        if (!row.fields[3].empty()) t.narrator_note = row.fields[3];
        d.turns.push_back(std::move(t));
    }
    validate_dialogue(d);
    return d;
}

std::string serialize_dialogue_csv(const Dialogue& d) {
    std::string out(kDialogueCsvHeader);
    out.push_back('\n');
    for (const auto& t : d.turns) {
        std::vector<std::string> fields = {
            std::to_string(t.index),
            std::string(to_string(t.speaker)),
            t.content,
            t.narrator_note.value_or(""),
        };
        out += csv::write_row(fields);
    }
    return out;
}

std::string render_dialogue_text(const Dialogue& d) {
    std::string out;
    for (const auto& t : d.turns) {
        out += std::to_string(t.index);
        out += ". ";
        out += to_string(t.speaker);
        out += ": ";
        out += t.content;
        out.push_back('\n');
        if (t.narrator_note) {
            out += "   [narrator: ";
            out += *t.narrator_note;
            out += "]\n";
        }
    }
    return out;
}

} // namespace famlens
