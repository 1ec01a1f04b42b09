#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "ctxengage/column_table.hpp"

namespace ctxengage {

// The five subsampling variants. All samplers are deterministic under
// (table, percent, seed), take exact floor-sized samples via a shuffled
// prefix, and emit row subsets of the source.

// Exactly floor(rows * percent / 100) distinct rows.
ColumnTable sample_random(const ColumnTable& table, int percent, std::uint64_t seed);

// Samples floor(|ids| * percent / 100) distinct values of the key column and
// keeps every row whose key was sampled (semi-join). Implements EU
// (engaging_user_id), EWU (engaged_with_user_id), and tweet (tweet_id).
ColumnTable sample_by_key(const ColumnTable& table, const std::string& key_column, int percent,
                          std::uint64_t seed);

// Samples sqrt(percent/100) of the engaged-with ids and of the engaging ids
// and keeps rows where both were sampled.
ColumnTable sample_inter(const ColumnTable& table, int percent, std::uint64_t seed);

// Applies a named technique: random | EU | EWU | inter_EWU+EU | tweet.
ColumnTable sample_technique(const ColumnTable& table, const std::string& technique, int percent,
                             std::uint64_t seed);

// unique-count / row_count for viewers, authors, and tweets.
std::map<std::string, double> ratio_report(const ColumnTable& table);

}  // namespace ctxengage
