#include "ctxengage/feat_history.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "ctxengage/registry.hpp"

namespace ctxengage {

namespace {

constexpr std::int64_t kDay = 86400;

std::string element_column(const std::string& element) {
    if (element == "hashtags") return "hashtags";
    if (element == "links") return "present_links";
    if (element == "domains") return "present_domains";
    throw std::runtime_error("unknown element kind: " + element);
}

// count[key][e] for positive and negative outcomes plus the all-rows total.
struct UserHistoryCounts {
    std::unordered_map<std::string, std::array<std::int64_t, 5>> positive, negative;
    std::unordered_map<std::string, std::int64_t> all;
};

UserHistoryCounts count_by_user(const ColumnTable& history, const std::string& key_col) {
    UserHistoryCounts out;
    const auto& keys = history.strings(key_col);
    std::array<std::span<const std::int64_t>, 5> labels;
    for (std::size_t e = 0; e < kEngagements.size(); ++e) labels[e] = history.i64(kEngagements[e]);
    for (std::size_t i = 0; i < keys.size(); ++i) {
        ++out.all[keys[i]];
        auto& pos = out.positive[keys[i]];
        auto& neg = out.negative[keys[i]];
        for (std::size_t e = 0; e < 5; ++e) {
            if (labels[e][i]) ++pos[e];
            else ++neg[e];
        }
    }
    return out;
}

}  // namespace

HistorySplit designate_history(const ColumnTable& train, const ColumnTable& target, const std::string& source) {
    if (source != "train") {
        return {train, target};
    }
    auto ts = train.i64("tweet_timestamp");
    if (ts.empty()) throw std::runtime_error("designate_history: empty train table");
    std::int64_t min_ts = *std::min_element(ts.begin(), ts.end());
    std::int64_t max_ts = *std::max_element(ts.begin(), ts.end());
    std::int64_t day0 = min_ts / kDay;
    if (max_ts / kDay - day0 + 1 < 7)
        throw std::runtime_error("designate_history: train span covers fewer than 7 UTC days");
    std::int64_t boundary = (day0 + 3) * kDay;

    std::vector<std::size_t> history_rows, remainder_rows;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        (ts[i] < boundary ? history_rows : remainder_rows).push_back(i);
    }
    return {train.take_rows(history_rows), train.take_rows(remainder_rows)};
}

ColumnTable user_engagement_counts(const ColumnTable& history, const ColumnTable& target) {
    auto viewer_counts = count_by_user(history, "engaging_user_id");
    auto author_counts = count_by_user(history, "engaged_with_user_id");

    const std::size_t n = target.row_count();
    const auto& viewers = target.strings("engaging_user_id");
    const auto& authors = target.strings("engaged_with_user_id");

    std::vector<std::pair<std::string, Column>> cols;
    for (int who = 0; who < 2; ++who) {
        const bool viewer_side = who == 0;
        const auto& counts = viewer_side ? viewer_counts : author_counts;
        const auto& keys = viewer_side ? viewers : authors;
        const std::string prefix = viewer_side ? "engaging" : "engaged_with";
        for (int outcome = 0; outcome < 2; ++outcome) {
            const auto& table = outcome == 0 ? counts.positive : counts.negative;
            for (std::size_t e = 0; e < kEngagements.size(); ++e) {
                Int64Data col;
                col.values.resize(n);
                for (std::size_t i = 0; i < n; ++i) {
                    auto it = table.find(keys[i]);
                    col.values[i] = it == table.end() ? 0 : it->second[e];
                }
                cols.emplace_back(prefix + "_count_" + (outcome == 0 ? "positive" : "negative") + "_tweets_" +
                                      kEngagements[e],
                                  Column(std::move(col)));
            }
        }
        Int64Data all;
        all.values.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            auto it = counts.all.find(keys[i]);
            all.values[i] = it == counts.all.end() ? 0 : it->second;
        }
        cols.emplace_back(prefix + "_count_all_tweets", Column(std::move(all)));
    }
    return target.with_columns(cols);
}

ColumnTable element_proxy_counts(const ColumnTable& history, const ColumnTable& target) {
    const std::size_t n = target.row_count();
    const auto& target_viewers = target.strings("engaging_user_id");

    std::array<std::span<const std::int64_t>, 5> labels;
    for (std::size_t e = 0; e < kEngagements.size(); ++e) labels[e] = history.i64(kEngagements[e]);
    const auto& history_viewers = history.strings("engaging_user_id");

    std::vector<std::pair<std::string, Column>> cols;
    for (const auto& element : kElements) {
        // Inverted index: token -> history rows whose set contains it.
        std::unordered_map<std::string, std::vector<std::uint32_t>> index;
        const auto& history_sets = history.sets(element_column(element));
        for (std::size_t i = 0; i < history_sets.size(); ++i) {
            for (const auto& token : history_sets[i]) index[token].push_back(static_cast<std::uint32_t>(i));
        }

        const auto& target_sets = target.sets(element_column(element));
        std::array<Int64Data, 5> pos, neg, proxy_pos, proxy_neg;
        Int64Data all;
        for (std::size_t e = 0; e < 5; ++e) {
            pos[e].values.assign(n, 0);
            neg[e].values.assign(n, 0);
            proxy_pos[e].values.assign(n, 0);
            proxy_neg[e].values.assign(n, 0);
        }
        all.values.assign(n, 0);

        std::vector<std::uint32_t> rows;
        for (std::size_t i = 0; i < n; ++i) {
            if (target_sets[i].empty()) continue;
            // Distinct history rows sharing at least one token with this row.
            rows.clear();
            for (const auto& token : target_sets[i]) {
                auto it = index.find(token);
                if (it != index.end()) rows.insert(rows.end(), it->second.begin(), it->second.end());
            }
            std::sort(rows.begin(), rows.end());
            rows.erase(std::unique(rows.begin(), rows.end()), rows.end());

            all.values[i] = static_cast<std::int64_t>(rows.size());
            for (auto r : rows) {
                const bool same_viewer = history_viewers[r] == target_viewers[i];
                for (std::size_t e = 0; e < 5; ++e) {
                    const bool engaged = labels[e][r] != 0;
                    if (engaged) {
                        ++pos[e].values[i];
                        if (same_viewer) ++proxy_pos[e].values[i];
                    } else {
                        ++neg[e].values[i];
                        if (same_viewer) ++proxy_neg[e].values[i];
                    }
                }
            }
        }

        for (std::size_t e = 0; e < 5; ++e)
            cols.emplace_back(element + "_count_positive_tweets_" + kEngagements[e], Column(std::move(pos[e])));
        for (std::size_t e = 0; e < 5; ++e)
            cols.emplace_back(element + "_count_negative_tweets_" + kEngagements[e], Column(std::move(neg[e])));
        for (std::size_t e = 0; e < 5; ++e)
            cols.emplace_back(element + "_user_proxy_count_positive_tweets_" + kEngagements[e],
                              Column(std::move(proxy_pos[e])));
        for (std::size_t e = 0; e < 5; ++e)
            cols.emplace_back(element + "_user_proxy_count_negative_tweets_" + kEngagements[e],
                              Column(std::move(proxy_neg[e])));
        cols.emplace_back(element + "_count_all_tweets", Column(std::move(all)));
    }
    return target.with_columns(cols);
}

ColumnTable language_history(const ColumnTable& history, const ColumnTable& target) {
    std::unordered_map<std::string, std::int64_t> seen, authored;
    {
        const auto& viewers = history.strings("engaging_user_id");
        const auto& authors = history.strings("engaged_with_user_id");
        const auto& langs = history.strings("language");
        for (std::size_t i = 0; i < viewers.size(); ++i) {
            ++seen[viewers[i] + '\x1f' + langs[i]];
            ++authored[authors[i] + '\x1f' + langs[i]];
        }
    }
    const std::size_t n = target.row_count();
    const auto& viewers = target.strings("engaging_user_id");
    const auto& authors = target.strings("engaged_with_user_id");
    const auto& langs = target.strings("language");
    Int64Data seen_col, authored_col;
    seen_col.values.resize(n);
    authored_col.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto s = seen.find(viewers[i] + '\x1f' + langs[i]);
        seen_col.values[i] = s == seen.end() ? 0 : s->second;
        auto a = authored.find(authors[i] + '\x1f' + langs[i]);
        authored_col.values[i] = a == authored.end() ? 0 : a->second;
    }
    return target.with_columns({
        {"this_language_seen_count", Column(std::move(seen_col))},
        {"this_language_authored_count", Column(std::move(authored_col))},
    });
}

ColumnTable ratio_features(const ColumnTable& table) {
    const std::size_t n = table.row_count();
    auto ratio = [&](const std::string& num_col, const std::string& den_col) {
        auto num = table.i64(num_col);
        auto den = table.i64(den_col);
        Float64Data out(n);
        for (std::size_t i = 0; i < n; ++i)
            out[i] = den[i] == 0 ? 0.0 : static_cast<double>(num[i]) / static_cast<double>(den[i]);
        return Column(std::move(out));
    };

    std::vector<std::pair<std::string, Column>> cols;
    for (const char* who : {"engaging", "engaged_with"}) {
        for (const char* outcome : {"positive", "negative"}) {
            for (const auto& e : kEngagements) {
                std::string stem = std::string(who) + "_count_" + outcome + "_tweets_" + e;
                cols.emplace_back("ratio_all_to_" + stem, ratio(stem, std::string(who) + "_count_all_tweets"));
            }
        }
    }
    for (const auto& element : kElements) {
        for (const char* proxy : {"", "user_proxy_"}) {
            for (const char* outcome : {"positive", "negative"}) {
                for (const auto& e : kEngagements) {
                    std::string stem = element + "_" + proxy + "count_" + outcome + "_tweets_" + e;
                    cols.emplace_back("ratio_all_to_" + stem, ratio(stem, element + "_count_all_tweets"));
                }
            }
        }
    }
    cols.emplace_back("ratio_seen_tweets_in_this_langauge_to_total_seen_tweets",
                      ratio("this_language_seen_count", "engaging_count_all_tweets"));
    cols.emplace_back("ratio_authored_tweets_in_this_langauge_to_total_authored_tweets",
                      ratio("this_language_authored_count", "engaged_with_count_all_tweets"));
    return table.with_columns(cols);
}

ColumnTable add_history_features(const ColumnTable& history, const ColumnTable& remainder) {
    ColumnTable out = user_engagement_counts(history, remainder);
    out = element_proxy_counts(history, out);
    out = language_history(history, out);
    return ratio_features(out);
}

ColumnTable merge_final(const ColumnTable& graph_stage, const ColumnTable& time_stage,
                        const ColumnTable& engagement_stage) {
    // The engagement-stage rows are the surviving remainder; join the other
    // stage outputs to them by row_index.
    auto build_position_map = [](const ColumnTable& t, bool skip_history) {
        std::unordered_map<std::int64_t, std::size_t> map;
        auto idx = t.i64("row_index");
        const Int64Data* marker = nullptr;
        if (skip_history && t.has_column("history_only")) marker = &t.i64_data("history_only");
        for (std::size_t i = 0; i < idx.size(); ++i) {
            if (marker && marker->values[i]) continue;
            if (!map.emplace(idx[i], i).second)
                throw std::runtime_error("merge_final: duplicate row_index " + std::to_string(idx[i]));
        }
        return map;
    };
    auto graph_pos = build_position_map(graph_stage, false);
    auto time_pos = build_position_map(time_stage, true);

    auto rows_in = [&](const std::unordered_map<std::int64_t, std::size_t>& map, const ColumnTable& from) {
        auto idx = engagement_stage.i64("row_index");
        std::vector<std::size_t> rows(idx.size());
        for (std::size_t i = 0; i < idx.size(); ++i) {
            auto it = map.find(idx[i]);
            if (it == map.end())
                throw std::runtime_error("merge_final: row_index " + std::to_string(idx[i]) + " missing from " +
                                         "a stage output");
            rows[i] = it->second;
        }
        return from.take_rows(rows);
    };

    ColumnTable graph_rows = rows_in(graph_pos, graph_stage);
    ColumnTable time_rows = rows_in(time_pos, time_stage);

    std::vector<std::pair<std::string, Column>> out;
    auto add_from = [&](const ColumnTable& src, const std::string& name) {
        out.emplace_back(name, src.column(name));
    };

    for (const auto& k : key_columns()) add_from(engagement_stage, k);
    for (const auto& l : label_columns()) add_from(engagement_stage, l);
    for (const auto& f : relevant_features()) {
        if (engagement_stage.has_column(f)) add_from(engagement_stage, f);
        else if (graph_rows.has_column(f)) add_from(graph_rows, f);
        else if (time_rows.has_column(f)) add_from(time_rows, f);
        else throw std::runtime_error("merge_final: feature " + f + " missing from all stage outputs");
    }
    for (const auto& f : oracle_features()) add_from(time_rows, f);
    return ColumnTable::from_columns(std::move(out));
}

}  // namespace ctxengage
