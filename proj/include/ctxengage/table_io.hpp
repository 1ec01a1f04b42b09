#pragma once

#include <filesystem>

#include "ctxengage/column_table.hpp"
#include "ctxengage/dataset_id.hpp"

namespace ctxengage {

// Stage artifacts are a data file plus a sidecar schema:
//   <name>.data.tsv    tab-separated cells, no header
//   <name>.schema.tsv  "column-name <tab> type" per line, written last
// Cell encoding: int64 as decimal (absent cell = empty), float64 as
// shortest-round-trip decimal, bool as 1/0, sets as sorted space-joined
// tokens (empty set = empty cell).

void write_table(const ColumnTable& table, const DatasetId& id, const std::filesystem::path& root,
                 bool overwrite = false);
void write_table(const ColumnTable& table, const std::string& name, const std::filesystem::path& root,
                 bool overwrite = false);

ColumnTable read_table(const DatasetId& id, const std::filesystem::path& root);
ColumnTable read_table(const std::string& name, const std::filesystem::path& root);

// True iff both the schema and the data file exist.
bool stage_exists(const DatasetId& id, const std::filesystem::path& root);
bool stage_exists(const std::string& name, const std::filesystem::path& root);

std::string format_double(double v);
double parse_double(const std::string& s);

}  // namespace ctxengage
