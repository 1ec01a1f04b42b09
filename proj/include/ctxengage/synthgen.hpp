#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "ctxengage/column_table.hpp"

namespace ctxengage {

// Deterministic synthetic interaction corpus. Identical seed gives byte
// identical output; per-column generator streams are derived by hashing
// (seed, column name), so adding columns never perturbs existing ones.
struct SynthConfig {
    std::uint64_t seed = 1;
    std::size_t n_rows = 10000;
    std::size_t n_viewers = 500;
    std::size_t n_authors = 200;
    std::size_t n_tweets = 5000;
    std::size_t n_hashtags = 300;
    std::size_t n_links = 200;
    std::size_t n_domains = 100;
    std::int64_t start_ts = 1580947200;  // 2020-02-06 00:00 UTC, a Thursday
    std::int64_t end_ts = 1580947200 + 14 * 86400;
    std::map<std::string, double> positive_rates = {
        {"like", 0.4}, {"reply", 0.05}, {"retweet", 0.1}, {"quote", 0.02}};
    double signal_strength = 0.5;

    void validate() const;
};

SynthConfig synth_config_from_file(const std::string& path);

// Generates a challenge-schema ColumnTable. Engagement timestamps, when
// present, lie in [tweet_ts, tweet_ts + 86400]. Label propensities follow a
// logistic model over author popularity, hashtag hotness, and a persistent
// viewer-author affinity, scaled by signal_strength and calibrated so each
// engagement's mean propensity equals its configured rate.
ColumnTable synth_generate(const SynthConfig& config);

// First 7 UTC days -> train-like, the rest -> holdout-like. Requires a span
// of at least 14 UTC days; tweet ids are disjoint across the two parts.
std::pair<ColumnTable, ColumnTable> split_by_week(const ColumnTable& table);

}  // namespace ctxengage
