#include "ctxengage/registry.hpp"

#include <stdexcept>
#include <unordered_map>

namespace ctxengage {

namespace {

std::vector<std::string> build_relevant() {
    std::vector<std::string> f;

    // Pre-provided.
    f.insert(f.end(), {"tweet_type", "language", "engaged_with_user_follower_count",
                       "engaged_with_user_following_count", "engaged_with_user_is_verified",
                       "engaging_user_follower_count", "engaging_user_following_count",
                       "engaging_user_is_verified", "engagee_follows_engager"});

    // Graph-based: second-degree follow flags, then engagement flags/counts
    // for both directions and degrees.
    f.push_back("graph_engagee_follows_engager_2d");
    f.push_back("graph_engager_follows_engagee_2d");
    for (const char* degree : {"1d", "2d"}) {
        for (const char* direction : {"engaging", "engaged"}) {
            const std::string from = direction == std::string("engaging") ? "engaged" : "engaging";
            for (const char* kind : {"flag", "count"}) {
                for (const auto& e : kEngagements)
                    f.push_back("graph_" + std::string(direction) + "_" + kind + "_" + e + "_from_" + from + "_" +
                                degree);
            }
        }
    }

    f.push_back("ratio_engaged_to_engaging_follower_counts");
    f.push_back("ratio_engaged_to_engaging_following_counts");

    // Sliding-window trend features.
    for (const char* prefix : {"", "user_"}) {
        for (const auto& w : kWindowSuffixes)
            for (const auto& elem : kElements) f.push_back(prefix + elem + "_frequency_" + w);
    }
    for (const auto& w : kWindowSuffixes) f.push_back("engaging_saw_tweets_count_" + w);
    for (const auto& w : kWindowSuffixes) f.push_back("engageds_tweets_views_count_" + w);

    // Engagement-history ratios.
    for (const char* who : {"engaging", "engaged_with"}) {
        for (const char* outcome : {"positive", "negative"}) {
            for (const auto& e : kEngagements)
                f.push_back("ratio_all_to_" + std::string(who) + "_count_" + outcome + "_tweets_" + e);
        }
    }
    for (const auto& elem : kElements) {
        for (const char* proxy : {"", "user_proxy_"}) {
            for (const char* outcome : {"positive", "negative"}) {
                for (const auto& e : kEngagements)
                    f.push_back("ratio_all_to_" + elem + "_" + proxy + "count_" + outcome + "_tweets_" + e);
            }
        }
    }

    f.push_back("this_language_seen_count");
    f.push_back("this_language_authored_count");
    // "langauge" matches the shipped column names.
    f.push_back("ratio_seen_tweets_in_this_langauge_to_total_seen_tweets");
    f.push_back("ratio_authored_tweets_in_this_langauge_to_total_authored_tweets");

    if (f.size() != 185) throw std::logic_error("relevant feature registry must have 185 entries");
    return f;
}

}  // namespace

const std::vector<std::string>& relevant_features() {
    static const std::vector<std::string> f = build_relevant();
    return f;
}

const std::vector<std::string>& oracle_features() {
    static const std::vector<std::string> f = {
        "hashtags_frequency",      "links_frequency",      "domains_frequency",
        "user_hashtags_frequency", "user_links_frequency", "user_domains_frequency",
        "engaging_saw_tweets_count", "engageds_tweets_views_count"};
    return f;
}

const std::vector<std::string>& label_columns() {
    static const std::vector<std::string> f = {"like", "reply", "retweet", "quote", "react"};
    return f;
}

const std::vector<std::string>& key_columns() {
    static const std::vector<std::string> f = {"row_index", "tweet_id", "engaged_with_user_id",
                                               "engaging_user_id", "tweet_timestamp"};
    return f;
}

std::size_t registry_index(const std::string& feature) {
    static const std::unordered_map<std::string, std::size_t> index = [] {
        std::unordered_map<std::string, std::size_t> m;
        std::size_t i = 0;
        for (const auto& f : relevant_features()) m[f] = i++;
        for (const auto& f : oracle_features()) m[f] = i++;
        return m;
    }();
    auto it = index.find(feature);
    if (it == index.end()) throw std::runtime_error("feature not in registry: " + feature);
    return it->second;
}

}  // namespace ctxengage
