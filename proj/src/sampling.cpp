#include "ctxengage/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>
#include <unordered_set>

#include "ctxengage/prng.hpp"

namespace ctxengage {

namespace {

// Shuffle-and-prefix: the sampled set for a larger percent is a superset of
// the set for a smaller one under the same seed.
std::vector<std::string> sample_id_prefix(const StringData& column, double fraction, std::uint64_t seed,
                                          const std::string& stream_tag) {
    std::set<std::string> distinct(column.begin(), column.end());
    if (distinct.empty()) throw std::runtime_error("sample: empty id set");
    std::vector<std::string> ids(distinct.begin(), distinct.end());
    auto rng = make_rng(seed, stream_tag);
    deterministic_shuffle(ids, rng);
    std::size_t keep = static_cast<std::size_t>(std::floor(static_cast<double>(ids.size()) * fraction));
    ids.resize(keep);
    return ids;
}

void check_percent(int percent) {
    if (percent <= 0 || percent > 100) throw std::runtime_error("sample percent must be in (0, 100]");
}

}  // namespace

ColumnTable sample_random(const ColumnTable& table, int percent, std::uint64_t seed) {
    check_percent(percent);
    if (table.row_count() == 0) throw std::runtime_error("sample_random: empty table");
    std::vector<std::size_t> rows(table.row_count());
    std::iota(rows.begin(), rows.end(), 0);
    auto rng = make_rng(seed, "sample_random");
    deterministic_shuffle(rows, rng);
    rows.resize(table.row_count() * static_cast<std::size_t>(percent) / 100);
    std::sort(rows.begin(), rows.end());
    return table.take_rows(rows);
}

ColumnTable sample_by_key(const ColumnTable& table, const std::string& key_column, int percent,
                          std::uint64_t seed) {
    check_percent(percent);
    auto kept_ids = sample_id_prefix(table.strings(key_column), static_cast<double>(percent) / 100.0, seed,
                                     "sample_by_key:" + key_column);
    std::unordered_set<std::string> keep(kept_ids.begin(), kept_ids.end());
    const auto& keys = table.strings(key_column);
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < keys.size(); ++i)
        if (keep.count(keys[i])) rows.push_back(i);
    return table.take_rows(rows);
}

ColumnTable sample_inter(const ColumnTable& table, int percent, std::uint64_t seed) {
    check_percent(percent);
    double fraction = std::sqrt(static_cast<double>(percent) / 100.0);
    auto ewu = sample_id_prefix(table.strings("engaged_with_user_id"), fraction, seed, "sample_inter:engaged_with");
    auto eu = sample_id_prefix(table.strings("engaging_user_id"), fraction, seed, "sample_inter:engaging");
    std::unordered_set<std::string> keep_ewu(ewu.begin(), ewu.end());
    std::unordered_set<std::string> keep_eu(eu.begin(), eu.end());
    const auto& authors = table.strings("engaged_with_user_id");
    const auto& viewers = table.strings("engaging_user_id");
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < authors.size(); ++i)
        if (keep_ewu.count(authors[i]) && keep_eu.count(viewers[i])) rows.push_back(i);
    return table.take_rows(rows);
}

ColumnTable sample_technique(const ColumnTable& table, const std::string& technique, int percent,
                             std::uint64_t seed) {
    if (technique == "random") return sample_random(table, percent, seed);
    if (technique == "EU") return sample_by_key(table, "engaging_user_id", percent, seed);
    if (technique == "EWU") return sample_by_key(table, "engaged_with_user_id", percent, seed);
    if (technique == "tweet") return sample_by_key(table, "tweet_id", percent, seed);
    if (technique == "inter_EWU+EU") return sample_inter(table, percent, seed);
    throw std::runtime_error("unknown sampling technique: " + technique);
}

std::map<std::string, double> ratio_report(const ColumnTable& table) {
    if (table.row_count() == 0) throw std::runtime_error("ratio_report: empty table");
    auto unique_count = [&](const std::string& col) {
        const auto& v = table.strings(col);
        std::unordered_set<std::string> s(v.begin(), v.end());
        return static_cast<double>(s.size());
    };
    double rows = static_cast<double>(table.row_count());
    return {
        {"viewers_per_row", unique_count("engaging_user_id") / rows},
        {"authors_per_row", unique_count("engaged_with_user_id") / rows},
        {"tweets_per_row", unique_count("tweet_id") / rows},
    };
}

}  // namespace ctxengage
