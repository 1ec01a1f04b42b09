#include "ctxengage/feat_time.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

#include "ctxengage/registry.hpp"

namespace ctxengage {

namespace {

constexpr std::int64_t k48h = 172800;

// Sorted timestamp lists per key; counting a window is two binary searches.
class KeyTimelines {
public:
    void add(const std::string& key, std::int64_t ts) { lists_[key].push_back(ts); }
    void finalize() {
        for (auto& [key, v] : lists_) std::sort(v.begin(), v.end());
    }
    std::int64_t count_in(const std::string& key, std::int64_t lo, std::int64_t hi) const {
        auto it = lists_.find(key);
        if (it == lists_.end()) return 0;
        const auto& v = it->second;
        return std::lower_bound(v.begin(), v.end(), hi) - std::lower_bound(v.begin(), v.end(), lo);
    }
    std::int64_t total(const std::string& key) const {
        auto it = lists_.find(key);
        return it == lists_.end() ? 0 : static_cast<std::int64_t>(it->second.size());
    }

private:
    std::unordered_map<std::string, std::vector<std::int64_t>> lists_;
};

std::string element_column(const std::string& element) {
    if (element == "hashtags") return "hashtags";
    if (element == "links") return "present_links";
    if (element == "domains") return "present_domains";
    throw std::runtime_error("unknown element kind: " + element);
}

}  // namespace

ColumnTable prepend_history_48h(const ColumnTable& train, const ColumnTable& target) {
    auto train_ts = train.i64("tweet_timestamp");
    auto target_ts = target.i64("tweet_timestamp");
    if (!train_ts.empty() && !target_ts.empty()) {
        std::int64_t train_max = *std::max_element(train_ts.begin(), train_ts.end());
        std::int64_t target_min = *std::min_element(target_ts.begin(), target_ts.end());
        if (train_max >= target_min)
            throw std::runtime_error("prepend_history_48h: train and target time ranges overlap");
    }

    std::vector<std::size_t> tail;
    if (!train_ts.empty()) {
        std::int64_t cutoff = *std::max_element(train_ts.begin(), train_ts.end()) - k48h;
        for (std::size_t i = 0; i < train_ts.size(); ++i)
            if (train_ts[i] >= cutoff) tail.push_back(i);
    }

    ColumnTable history = train.take_rows(tail).select_columns(target.column_names());
    ColumnTable combined = ColumnTable::concat_rows(history, target);
    Int64Data marker;
    marker.values.assign(combined.row_count(), 0);
    for (std::size_t i = 0; i < tail.size(); ++i) marker.values[i] = 1;
    return combined.with_column("history_only", Column(std::move(marker)));
}

ColumnTable mark_no_history(const ColumnTable& table) {
    Int64Data marker;
    marker.values.assign(table.row_count(), 0);
    return table.with_column("history_only", Column(std::move(marker)));
}

ColumnTable view_counts(const ColumnTable& table) {
    const auto ts = table.i64("tweet_timestamp");
    const std::size_t n = table.row_count();

    std::vector<std::pair<std::string, Column>> cols;
    for (const char* key_col : {"engaging_user_id", "engaged_with_user_id"}) {
        const auto& keys = table.strings(key_col);
        KeyTimelines timelines;
        for (std::size_t i = 0; i < n; ++i) timelines.add(keys[i], ts[i]);
        timelines.finalize();

        const bool viewer = key_col == std::string("engaging_user_id");
        for (std::size_t w = 0; w < kWindowSeconds.size(); ++w) {
            Int64Data counts;
            counts.values.resize(n);
            for (std::size_t i = 0; i < n; ++i)
                counts.values[i] = timelines.count_in(keys[i], ts[i] - kWindowSeconds[w], ts[i]);
            std::string name = viewer ? "engaging_saw_tweets_count_" : "engageds_tweets_views_count_";
            cols.emplace_back(name + kWindowSuffixes[w], Column(std::move(counts)));
        }
    }
    return table.with_columns(cols);
}

ColumnTable element_frequency(const ColumnTable& table, const std::string& element) {
    const auto ts = table.i64("tweet_timestamp");
    const auto& sets = table.sets(element_column(element));
    const auto& viewers = table.strings("engaging_user_id");
    const std::size_t n = table.row_count();

    KeyTimelines global, per_user;
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& token : sets[i]) {
            global.add(token, ts[i]);
            per_user.add(viewers[i] + '\x1f' + token, ts[i]);
        }
    }
    global.finalize();
    per_user.finalize();

    std::vector<std::pair<std::string, Column>> cols;
    for (int variant = 0; variant < 2; ++variant) {
        const bool user = variant == 1;
        for (std::size_t w = 0; w < kWindowSeconds.size(); ++w) {
            Int64Data counts;
            counts.values.resize(n);
            for (std::size_t i = 0; i < n; ++i) {
                std::int64_t total = 0;
                for (const auto& token : sets[i]) {
                    total += user ? per_user.count_in(viewers[i] + '\x1f' + token, ts[i] - kWindowSeconds[w], ts[i])
                                  : global.count_in(token, ts[i] - kWindowSeconds[w], ts[i]);
                }
                counts.values[i] = total;
            }
            std::string name = (user ? "user_" : "") + element + "_frequency_" + kWindowSuffixes[w];
            cols.emplace_back(name, Column(std::move(counts)));
        }
    }
    return table.with_columns(cols);
}

ColumnTable oracle_frequencies(const ColumnTable& table) {
    const auto ts = table.i64("tweet_timestamp");
    const auto& viewers = table.strings("engaging_user_id");
    const auto& authors = table.strings("engaged_with_user_id");
    const std::size_t n = table.row_count();

    std::vector<std::pair<std::string, Column>> cols;
    for (const auto& element : kElements) {
        const auto& sets = table.sets(element_column(element));
        KeyTimelines global, per_user;
        for (std::size_t i = 0; i < n; ++i) {
            for (const auto& token : sets[i]) {
                global.add(token, ts[i]);
                per_user.add(viewers[i] + '\x1f' + token, ts[i]);
            }
        }
        global.finalize();
        per_user.finalize();

        Int64Data g_counts, u_counts;
        g_counts.values.resize(n);
        u_counts.values.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            std::int64_t g = 0, u = 0;
            for (const auto& token : sets[i]) {
                g += global.total(token) - 1;  // the row itself appears exactly once
                u += per_user.total(viewers[i] + '\x1f' + token) - 1;
            }
            g_counts.values[i] = g;
            u_counts.values[i] = u;
        }
        cols.emplace_back(element + "_frequency", Column(std::move(g_counts)));
        cols.emplace_back("user_" + element + "_frequency", Column(std::move(u_counts)));
    }

    KeyTimelines viewer_rows, author_rows;
    for (std::size_t i = 0; i < n; ++i) {
        viewer_rows.add(viewers[i], ts[i]);
        author_rows.add(authors[i], ts[i]);
    }
    Int64Data saw, seen;
    saw.values.resize(n);
    seen.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        saw.values[i] = viewer_rows.total(viewers[i]) - 1;
        seen.values[i] = author_rows.total(authors[i]) - 1;
    }
    cols.emplace_back("engaging_saw_tweets_count", Column(std::move(saw)));
    cols.emplace_back("engageds_tweets_views_count", Column(std::move(seen)));
    return table.with_columns(cols);
}

ColumnTable add_time_features(const ColumnTable& table) {
    ColumnTable out = view_counts(table);
    for (const auto& element : kElements) out = element_frequency(out, element);
    return oracle_frequencies(out);
}

}  // namespace ctxengage
