#pragma once

#include <iosfwd>
#include <string>

#include "ctxengage/column_table.hpp"

namespace ctxengage {

// The 24 challenge columns, in schema order.
const std::vector<std::string>& challenge_columns();

struct ParseError : std::runtime_error {
    ParseError(std::size_t line, std::size_t field, const std::string& what);
    std::size_t line;   // 1-based
    std::size_t field;  // 0-based; SIZE_MAX when the row itself is malformed
};

struct TsvOptions {
    // Delimiter between tokens of a list-valued field. The challenge docs say
    // "tab separated list" inside a tab-separated row, which cannot be taken
    // literally; real exports use a secondary delimiter, space by default here.
    char sub_separator = ' ';
};

// Parses the challenge TSV schema into a ColumnTable (one row per line).
// Empty engagement timestamps become absent cells; empty list fields become
// empty sets. Malformed rows and unknown enum tokens raise ParseError.
ColumnTable parse_tsv(std::istream& in, const TsvOptions& opts = {});
ColumnTable parse_tsv_string(const std::string& text, const TsvOptions& opts = {});

// Re-serializes a challenge-schema table to the input TSV format.
void serialize_tsv(const ColumnTable& table, std::ostream& out, const TsvOptions& opts = {});
std::string serialize_tsv_string(const ColumnTable& table, const TsvOptions& opts = {});

}  // namespace ctxengage
