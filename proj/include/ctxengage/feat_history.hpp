#pragma once

#include "ctxengage/column_table.hpp"

namespace ctxengage {

// Stage FE04: features computed from the designated engagement history, then
// the ratio features that actually feed the models.

struct HistorySplit {
    ColumnTable history;
    ColumnTable remainder;
};

// For train targets: first 3 UTC days (Thu-Sat) are history, the remaining
// 4 days the remainder; requires a 7-day span. For holdout targets the whole
// matching train table is the history and the target itself the remainder.
HistorySplit designate_history(const ColumnTable& train, const ColumnTable& target, const std::string& source);

// Per-user positive/negative engagement counts against the history:
// engaging_count_{positive,negative}_tweets_{e}, engaged_with_* variants,
// and the two *_count_all_tweets denominators.
ColumnTable user_engagement_counts(const ColumnTable& history, const ColumnTable& target);

// Element-based history counts. For each of hashtags/links/domains:
// {elem}_count_{positive,negative}_tweets_{e} over any viewer,
// {elem}_user_proxy_count_{positive,negative}_tweets_{e} restricted to the
// row's viewer, and {elem}_count_all_tweets. Empty element set -> 0.
ColumnTable element_proxy_counts(const ColumnTable& history, const ColumnTable& target);

// this_language_seen_count / this_language_authored_count.
ColumnTable language_history(const ColumnTable& history, const ColumnTable& target);

// The 82 ratio columns (20 user + 60 element + 2 language); denominator
// 0 -> 0.
ColumnTable ratio_features(const ColumnTable& table);

// All FE04 columns onto the remainder table.
ColumnTable add_history_features(const ColumnTable& history, const ColumnTable& remainder);

// Stage FE05: joins the graph/time/engagement stage outputs on row_index,
// drops first-3-day train rows and prepended 48h rows, and trims the column
// set to keys, labels, the 185 relevant features, and the 8 oracle features.
ColumnTable merge_final(const ColumnTable& graph_stage, const ColumnTable& time_stage,
                        const ColumnTable& engagement_stage);

}  // namespace ctxengage
