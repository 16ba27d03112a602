// SPDX-License-Identifier: Apache-2.0
#include "famlens/csv.hpp"

#include "famlens/error.hpp"

namespace famlens::csv {

std::vector<Row> parse(std::string_view bytes) {
    std::vector<Row> rows;
    std::size_t i = 0;
    std::size_t line = 1;
    const std::size_t n = bytes.size();

    while (i < n) {
        Row row;
        row.line = line;
        std::string field;
        bool in_quotes = false;
        bool field_was_quoted = false;

        for (;;) {
            if (i >= n) {
                if (in_quotes) {
                    throw Error::validation("csv: unterminated quoted field starting near line " +
                                            std::to_string(row.line));
                }
                row.fields.push_back(std::move(field));
                rows.push_back(std::move(row));
                return rows;
            }
            char c = bytes[i];
            if (in_quotes) {
                if (c == '"') {
                    if (i + 1 < n && bytes[i + 1] == '"') {
                        field.push_back('"');
                        i += 2;
                    } else {
                        in_quotes = false;
                        ++i;
                    }
                } else {
                    if (c == '\n') ++line;
                    field.push_back(c);
                    ++i;
                }
                continue;
            }
            if (c == '"') {
                if (!field.empty() || field_was_quoted) {
                    throw Error::validation("csv: stray quote at line " + std::to_string(line));
                }
                in_quotes = true;
                field_was_quoted = true;
                ++i;
            } else if (c == ',') {
                row.fields.push_back(std::move(field));
                field.clear();
                field_was_quoted = false;
                ++i;
            } else if (c == '\n' || c == '\r') {
                if (c == '\r' && i + 1 < n && bytes[i + 1] == '\n') ++i;
                ++i;
                ++line;
                row.fields.push_back(std::move(field));
                rows.push_back(std::move(row));
                break;
            } else {
                field.push_back(c);
                ++i;
            }
        }
    }
    return rows;
}

std::string quote_field(std::string_view field) {
    bool needs_quotes = field.find_first_of(",\"\n\r") != std::string_view::npos;
    if (!needs_quotes) return std::string(field);
    std::string out;
    out.reserve(field.size() + 2);
    out.push_back('"');
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string write_row(std::span<const std::string> fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i > 0) out.push_back(',');
        out += quote_field(fields[i]);
    }
    out.push_back('\n');
    return out;
}

} // namespace famlens::csv
