#pragma once

#include "ctxengage/column_table.hpp"

namespace ctxengage {

// Stage FE03: trend counts over the six windows {0.5h,1h,2h,12h,24h,48h}
// plus whole-corpus "oracle" frequencies. Window semantics are half-open
// [t - w, t): a row never counts itself and same-timestamp rows do not count
// toward each other. Implemented as per-key sweeps over time-sorted rows;
// the O(n^2) scan exists only as a test oracle.

// Prepends the last two days of the train table to the target and adds a
// history_only marker column (1 for prepended rows). The marked rows feed
// window counts but are dropped before the final merge.
ColumnTable prepend_history_48h(const ColumnTable& train, const ColumnTable& target);

// For train-source tables: same marker column, no prepended rows.
ColumnTable mark_no_history(const ColumnTable& table);

// engaging_saw_tweets_count_{w} and engageds_tweets_views_count_{w}.
ColumnTable view_counts(const ColumnTable& table);

// {elem}_frequency_{w} and user_{elem}_frequency_{w} for one element column
// (hashtags | links | domains).
ColumnTable element_frequency(const ColumnTable& table, const std::string& element);

// The 8 whole-corpus variants (self excluded).
ColumnTable oracle_frequencies(const ColumnTable& table);

// All FE03 columns.
ColumnTable add_time_features(const ColumnTable& table);

}  // namespace ctxengage
