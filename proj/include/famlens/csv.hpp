// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace famlens::csv {

struct Row {
    std::vector<std::string> fields;
    std::size_t line = 0; // physical line the row starts on, 1-based
};

/// RFC-4180 parser. Accepts LF and CRLF line endings and quoted fields
/// containing commas, quotes, and newlines. Throws famlens::Error
/// (validation) on stray or unterminated quotes.
std::vector<Row> parse(std::string_view bytes);

/// Serializes one row with minimal quoting: a field is quoted only when it
/// contains a comma, a quote, or a line break. Output ends with '\n'.
std::string write_row(std::span<const std::string> fields);

inline std::string write_row(std::initializer_list<std::string> fields) {
    return write_row(std::span<const std::string>(fields.begin(), fields.size()));
}

std::string quote_field(std::string_view field);

} // namespace famlens::csv
