#pragma once

#include <cstdint>

#include "ctxengage/column_table.hpp"

namespace ctxengage {

// Stage FE00: binary labels. Each of like/reply/retweet/quote is 1 iff its
// timestamp is present; react is their disjunction.
ColumnTable derive_labels(const ColumnTable& table);

// Stage FE01 encodings.
ColumnTable encode_media_and_elements(const ColumnTable& table);

// tweet_weekday in 1..7 with UTC Thursday = 1, tweet_hour in 0..23 UTC.
ColumnTable encode_time(const ColumnTable& table);

struct EncodeAgesResult {
    ColumnTable table;
    // Accounts created before 2006-03 clamped to age 0.
    std::size_t clamped_count = 0;
};

// Account ages in months since March 2006 plus creation years, UTC calendar.
EncodeAgesResult encode_ages(const ColumnTable& table);

// language_unknown = 1 iff language equals the unknown-language hash.
ColumnTable encode_language_flag(const ColumnTable& table);

// All of FE01 in stage order.
ColumnTable encode_all(const ColumnTable& table, std::size_t* clamped_count = nullptr);

// UTC calendar pieces used by the encoders and their test oracles.
struct CivilDate {
    int year;
    unsigned month;  // 1..12
    unsigned day;    // 1..31
};
CivilDate civil_from_unix(std::int64_t ts);

inline const char* kUnknownLanguageHash = "B9175601E87101A984A50F8A62A1C374";

}  // namespace ctxengage
