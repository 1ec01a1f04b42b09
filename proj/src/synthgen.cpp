#include "ctxengage/synthgen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "ctxengage/config_file.hpp"
#include "ctxengage/prng.hpp"

namespace ctxengage {

namespace {

constexpr std::int64_t kDay = 86400;
const char* kUnknownLanguage = "B9175601E87101A984A50F8A62A1C374";

std::string padded_id(const char* prefix, std::size_t i) {
    std::string num = std::to_string(i);
    std::string out = prefix;
    out.append(8 - std::min<std::size_t>(8, num.size()), '0');
    out += num;
    return out;
}

// Zipf-like weights; heavy head so popular entities dominate appearances.
std::vector<double> zipf_weights(std::size_t n, double exponent) {
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = 1.0 / std::pow(static_cast<double>(i + 1), exponent);
    return w;
}

class WeightedPicker {
public:
    explicit WeightedPicker(const std::vector<double>& weights) : cumulative_(weights.size()) {
        double total = 0.0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            total += weights[i];
            cumulative_[i] = total;
        }
    }
    std::size_t pick(double u01) const {
        double target = u01 * cumulative_.back();
        return std::upper_bound(cumulative_.begin(), cumulative_.end(), target) - cumulative_.begin();
    }

private:
    std::vector<double> cumulative_;
};

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Finds b with mean(sigmoid(b + s_i)) == rate, by bisection.
double calibrate_intercept(const std::vector<double>& signals, double rate) {
    double lo = -40.0, hi = 40.0;
    auto mean_at = [&](double b) {
        double acc = 0.0;
        for (double s : signals) acc += sigmoid(b + s);
        return acc / static_cast<double>(signals.size());
    };
    for (int it = 0; it < 100; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mean_at(mid) < rate) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

void standardize(std::vector<double>& v) {
    double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    var /= static_cast<double>(v.size());
    double sd = var > 0 ? std::sqrt(var) : 1.0;
    for (double& x : v) x = (x - mean) / sd;
}

struct Universe {
    std::vector<std::string> author_ids, viewer_ids;
    std::vector<std::int64_t> author_followers, author_following, author_creation;
    std::vector<std::int64_t> viewer_followers, viewer_following, viewer_creation;
    std::vector<std::uint8_t> author_verified, viewer_verified;
    std::vector<std::size_t> author_language;
    std::vector<std::string> languages;
    std::vector<std::string> hashtags, links, domains;
};

struct Tweets {
    std::vector<std::string> ids;
    std::vector<std::size_t> author;
    std::vector<std::int64_t> ts;
    std::vector<std::vector<std::string>> hashtags, links, domains;
    std::vector<std::string> media, type, language;
    std::vector<double> hotness;  // summed hashtag weights
};

std::int64_t creation_ts(std::mt19937_64& rng) {
    // Anywhere from 2006-04 to 2019-12, in whole seconds.
    constexpr std::int64_t lo = 1143849600;  // 2006-04-01
    constexpr std::int64_t hi = 1577836800;  // 2020-01-01
    return lo + static_cast<std::int64_t>(uniform01(rng) * static_cast<double>(hi - lo));
}

}  // namespace

void SynthConfig::validate() const {
    if (end_ts - start_ts < 7 * kDay) throw std::runtime_error("synthgen: span must cover at least 7 days");
    if (n_rows < 1 || n_viewers < 1 || n_authors < 1 || n_tweets < 1 || n_hashtags < 1 || n_links < 1 ||
        n_domains < 1)
        throw std::runtime_error("synthgen: all cardinalities must be >= 1");
    for (const auto& [name, rate] : positive_rates) {
        if (rate < 0.0 || rate > 1.0) throw std::runtime_error("synthgen: rate for " + name + " outside [0,1]");
    }
    if (signal_strength < 0.0 || signal_strength > 1.0)
        throw std::runtime_error("synthgen: signal_strength outside [0,1]");
}

SynthConfig synth_config_from_file(const std::string& path) {
    auto cfg = KeyValueConfig::parse_file(path);
    SynthConfig out;
    out.seed = static_cast<std::uint64_t>(cfg.get_int("seed", static_cast<std::int64_t>(out.seed)));
    out.n_rows = static_cast<std::size_t>(cfg.get_int("n_rows", static_cast<std::int64_t>(out.n_rows)));
    out.n_viewers = static_cast<std::size_t>(cfg.get_int("n_viewers", static_cast<std::int64_t>(out.n_viewers)));
    out.n_authors = static_cast<std::size_t>(cfg.get_int("n_authors", static_cast<std::int64_t>(out.n_authors)));
    out.n_tweets = static_cast<std::size_t>(cfg.get_int("n_tweets", static_cast<std::int64_t>(out.n_tweets)));
    out.n_hashtags = static_cast<std::size_t>(cfg.get_int("n_hashtags", static_cast<std::int64_t>(out.n_hashtags)));
    out.n_links = static_cast<std::size_t>(cfg.get_int("n_links", static_cast<std::int64_t>(out.n_links)));
    out.n_domains = static_cast<std::size_t>(cfg.get_int("n_domains", static_cast<std::int64_t>(out.n_domains)));
    out.start_ts = cfg.get_int("start_ts", out.start_ts);
    out.end_ts = cfg.get_int("end_ts", out.end_ts);
    for (const char* name : {"like", "reply", "retweet", "quote"})
        out.positive_rates[name] = cfg.get_double(std::string("rate_") + name, out.positive_rates[name]);
    out.signal_strength = cfg.get_double("signal_strength", out.signal_strength);
    cfg.reject_unknown_keys();
    out.validate();
    return out;
}

ColumnTable synth_generate(const SynthConfig& config) {
    config.validate();
    const auto seed = config.seed;

    Universe u;
    u.languages = {"ECED8A16BE2A5E8871FD55F4842F16B1", kUnknownLanguage};
    for (int i = 2; i < 12; ++i) u.languages.push_back(padded_id("LANGX", i));

    {
        auto rng = make_rng(seed, "authors");
        auto weights = zipf_weights(config.n_authors, 0.8);
        for (std::size_t i = 0; i < config.n_authors; ++i) {
            u.author_ids.push_back(padded_id("A", i));
            double base = 50000.0 * weights[i];
            u.author_followers.push_back(
                static_cast<std::int64_t>(base * std::exp(0.6 * (uniform01(rng) * 2.0 - 1.0))));
            u.author_following.push_back(static_cast<std::int64_t>(50 + uniform01(rng) * 2000));
            u.author_verified.push_back(uniform01(rng) < weights[i] * 0.8 ? 1 : 0);
            u.author_creation.push_back(creation_ts(rng));
            u.author_language.push_back(static_cast<std::size_t>(uniform01(rng) * 4.0) % u.languages.size());
        }
    }
    {
        auto rng = make_rng(seed, "viewers");
        for (std::size_t i = 0; i < config.n_viewers; ++i) {
            u.viewer_ids.push_back(padded_id("V", i));
            u.viewer_followers.push_back(static_cast<std::int64_t>(10 + uniform01(rng) * 3000));
            u.viewer_following.push_back(static_cast<std::int64_t>(20 + uniform01(rng) * 3000));
            u.viewer_verified.push_back(uniform01(rng) < 0.02 ? 1 : 0);
            u.viewer_creation.push_back(creation_ts(rng));
        }
    }
    for (std::size_t i = 0; i < config.n_hashtags; ++i) u.hashtags.push_back(padded_id("H", i));
    for (std::size_t i = 0; i < config.n_links; ++i) u.links.push_back(padded_id("L", i));
    for (std::size_t i = 0; i < config.n_domains; ++i) u.domains.push_back(padded_id("D", i));

    const auto author_weights = zipf_weights(config.n_authors, 0.8);
    const auto viewer_weights = zipf_weights(config.n_viewers, 0.6);
    const auto hashtag_weights = zipf_weights(config.n_hashtags, 1.0);
    const WeightedPicker pick_author(author_weights);
    const WeightedPicker pick_viewer(viewer_weights);
    const WeightedPicker pick_hashtag(hashtag_weights);
    const WeightedPicker pick_link(zipf_weights(config.n_links, 1.0));
    const WeightedPicker pick_domain(zipf_weights(config.n_domains, 1.0));

    // Tweets are assigned to a UTC week up front and take their ids from
    // per-week ranges, which keeps the week split tweet-disjoint.
    Tweets t;
    {
        auto rng = make_rng(seed, "tweets");
        const std::int64_t week1_end = std::min(config.end_ts, config.start_ts + 7 * kDay);
        const double week1_fraction =
            static_cast<double>(week1_end - config.start_ts) / static_cast<double>(config.end_ts - config.start_ts);
        const std::array<const char*, 4> tweet_types = {"TopLevel", "Retweet", "Reply", "Quote"};
        std::size_t next_id_w1 = 0, next_id_w2 = 0;
        for (std::size_t i = 0; i < config.n_tweets; ++i) {
            bool week1 = uniform01(rng) < week1_fraction;
            std::int64_t lo = week1 ? config.start_ts : week1_end;
            std::int64_t hi = week1 ? week1_end : config.end_ts;
            t.ids.push_back(week1 ? padded_id("T1", next_id_w1++) : padded_id("T2", next_id_w2++));
            t.ts.push_back(lo + static_cast<std::int64_t>(uniform01(rng) * static_cast<double>(hi - lo)));
            t.author.push_back(pick_author.pick(uniform01(rng)));

            std::vector<std::string> tags;
            double hot = 0.0;
            std::size_t n_tags = static_cast<std::size_t>(uniform01(rng) * 3.2);
            for (std::size_t j = 0; j < n_tags; ++j) {
                std::size_t h = pick_hashtag.pick(uniform01(rng));
                tags.push_back(u.hashtags[h]);
                hot += hashtag_weights[h];
            }
            std::sort(tags.begin(), tags.end());
            tags.erase(std::unique(tags.begin(), tags.end()), tags.end());
            t.hashtags.push_back(std::move(tags));
            t.hotness.push_back(hot);

            std::vector<std::string> links, domains;
            if (uniform01(rng) < 0.3) {
                links.push_back(u.links[pick_link.pick(uniform01(rng))]);
                domains.push_back(u.domains[pick_domain.pick(uniform01(rng))]);
            }
            std::sort(links.begin(), links.end());
            std::sort(domains.begin(), domains.end());
            t.links.push_back(std::move(links));
            t.domains.push_back(std::move(domains));

            std::string media;
            double m = uniform01(rng);
            if (m < 0.3) media = "Photo";
            else if (m < 0.4) media = "Photo Photo";
            else if (m < 0.55) media = "Video";
            else if (m < 0.6) media = "GIF";
            t.media.push_back(media);
            t.type.push_back(tweet_types[static_cast<std::size_t>(uniform01(rng) * 4.0) % 4]);
            std::size_t lang = u.author_language[t.author.back()];
            if (uniform01(rng) < 0.1) lang = static_cast<std::size_t>(uniform01(rng) * u.languages.size());
            t.language.push_back(u.languages[lang % u.languages.size()]);
        }
    }

    // Interactions: weighted author -> one of their tweets; viewers drawn
    // mostly from the author's fixed audience so pairs recur across weeks.
    std::vector<std::vector<std::size_t>> tweets_of_author(config.n_authors);
    for (std::size_t i = 0; i < t.ids.size(); ++i) tweets_of_author[t.author[i]].push_back(i);

    const std::size_t audience_size = std::max<std::size_t>(3, config.n_viewers / 50);
    auto audience_member = [&](std::size_t author, std::size_t slot) {
        return hash64(u.author_ids[author], seed + slot * 2654435761ULL) % config.n_viewers;
    };

    std::vector<std::size_t> row_tweet(config.n_rows), row_viewer(config.n_rows);
    {
        auto rng = make_rng(seed, "interactions");
        for (std::size_t r = 0; r < config.n_rows; ++r) {
            std::size_t author = pick_author.pick(uniform01(rng));
            while (tweets_of_author[author].empty()) author = (author + 1) % config.n_authors;
            const auto& pool = tweets_of_author[author];
            row_tweet[r] = pool[static_cast<std::size_t>(uniform01(rng) * static_cast<double>(pool.size())) %
                                pool.size()];
            if (uniform01(rng) < 0.75) {
                row_viewer[r] = audience_member(author, static_cast<std::size_t>(uniform01(rng) * audience_size));
            } else {
                row_viewer[r] = pick_viewer.pick(uniform01(rng));
            }
        }
    }

    // Signal components, standardized across rows so signal_strength has a
    // consistent meaning regardless of corpus shape.
    std::vector<double> z_pop(config.n_rows), z_aff(config.n_rows), z_hot(config.n_rows);
    for (std::size_t r = 0; r < config.n_rows; ++r) {
        std::size_t tw = row_tweet[r];
        std::size_t author = t.author[tw];
        z_pop[r] = std::log1p(static_cast<double>(u.author_followers[author]));
        z_aff[r] = static_cast<double>(hash64(u.viewer_ids[row_viewer[r]] + "|" + u.author_ids[author], seed) %
                                       1000) /
                   999.0;
        z_hot[r] = t.hotness[tw];
    }
    standardize(z_pop);
    standardize(z_aff);
    standardize(z_hot);
    std::vector<double> signal(config.n_rows);
    for (std::size_t r = 0; r < config.n_rows; ++r) {
        signal[r] = 3.0 * config.signal_strength * (1.0 * z_pop[r] + 1.0 * z_aff[r] + 0.6 * z_hot[r]) / 2.6;
    }

    // engagee_follows_engager: author follows viewer, more likely for
    // high-affinity pairs.
    BoolData follows(config.n_rows);
    {
        auto rng = make_rng(seed, "engagee_follows_engager");
        for (std::size_t r = 0; r < config.n_rows; ++r)
            follows[r] = uniform01(rng) < 0.05 + 0.25 * (z_aff[r] + 2.0) / 4.0 ? 1 : 0;
    }

    const std::array<const char*, 4> engagement_cols = {"reply_timestamp", "retweet_timestamp",
                                                        "retweet_with_comment_timestamp", "like_timestamp"};
    const std::array<const char*, 4> engagement_names = {"reply", "retweet", "quote", "like"};
    std::array<Int64Data, 4> engagement_ts;
    for (std::size_t e = 0; e < 4; ++e) {
        auto it = config.positive_rates.find(engagement_names[e]);
        double rate = it == config.positive_rates.end() ? 0.0 : it->second;
        auto& col = engagement_ts[e];
        col.values.assign(config.n_rows, 0);
        col.present.assign(config.n_rows, 0);
        auto rng = make_rng(seed, engagement_cols[e]);
        if (rate <= 0.0) continue;
        if (rate >= 1.0) {
            for (std::size_t r = 0; r < config.n_rows; ++r) {
                col.present[r] = 1;
                col.values[r] = t.ts[row_tweet[r]] + static_cast<std::int64_t>(uniform01(rng) * kDay);
            }
            continue;
        }
        double intercept = calibrate_intercept(signal, rate);
        for (std::size_t r = 0; r < config.n_rows; ++r) {
            double p = sigmoid(intercept + signal[r]);
            double u1 = uniform01(rng);
            double u2 = uniform01(rng);
            if (u1 < p) {
                col.present[r] = 1;
                col.values[r] = t.ts[row_tweet[r]] + static_cast<std::int64_t>(u2 * kDay);
            }
        }
    }

    // Assemble challenge-schema columns.
    StringData text_tokens(config.n_rows), tweet_id(config.n_rows), present_media(config.n_rows),
        tweet_type(config.n_rows), language(config.n_rows), ewu_id(config.n_rows), eu_id(config.n_rows);
    StringSetData hashtag_col(config.n_rows), links_col(config.n_rows), domains_col(config.n_rows);
    Int64Data tweet_ts, ewu_follower, ewu_following, ewu_creation, eu_follower, eu_following, eu_creation;
    BoolData ewu_verified(config.n_rows), eu_verified(config.n_rows);
    tweet_ts.values.resize(config.n_rows);
    ewu_follower.values.resize(config.n_rows);
    ewu_following.values.resize(config.n_rows);
    ewu_creation.values.resize(config.n_rows);
    eu_follower.values.resize(config.n_rows);
    eu_following.values.resize(config.n_rows);
    eu_creation.values.resize(config.n_rows);

    for (std::size_t r = 0; r < config.n_rows; ++r) {
        std::size_t tw = row_tweet[r];
        std::size_t author = t.author[tw];
        std::size_t viewer = row_viewer[r];
        text_tokens[r] = "101 " + std::to_string(1000 + tw % 29000) + " 102";
        hashtag_col[r] = t.hashtags[tw];
        tweet_id[r] = t.ids[tw];
        present_media[r] = t.media[tw];
        links_col[r] = t.links[tw];
        domains_col[r] = t.domains[tw];
        tweet_type[r] = t.type[tw];
        language[r] = t.language[tw];
        tweet_ts.values[r] = t.ts[tw];
        ewu_id[r] = u.author_ids[author];
        ewu_follower.values[r] = u.author_followers[author];
        ewu_following.values[r] = u.author_following[author];
        ewu_verified[r] = u.author_verified[author];
        ewu_creation.values[r] = u.author_creation[author];
        eu_id[r] = u.viewer_ids[viewer];
        eu_follower.values[r] = u.viewer_followers[viewer];
        eu_following.values[r] = u.viewer_following[viewer];
        eu_verified[r] = u.viewer_verified[viewer];
        eu_creation.values[r] = u.viewer_creation[viewer];
    }

    return ColumnTable::from_columns({
        {"text_tokens", Column(std::move(text_tokens))},
        {"hashtags", Column(std::move(hashtag_col))},
        {"tweet_id", Column(std::move(tweet_id))},
        {"present_media", Column(std::move(present_media))},
        {"present_links", Column(std::move(links_col))},
        {"present_domains", Column(std::move(domains_col))},
        {"tweet_type", Column(std::move(tweet_type))},
        {"language", Column(std::move(language))},
        {"tweet_timestamp", Column(std::move(tweet_ts))},
        {"engaged_with_user_id", Column(std::move(ewu_id))},
        {"engaged_with_user_follower_count", Column(std::move(ewu_follower))},
        {"engaged_with_user_following_count", Column(std::move(ewu_following))},
        {"engaged_with_user_is_verified", Column(std::move(ewu_verified))},
        {"engaged_with_user_account_creation", Column(std::move(ewu_creation))},
        {"engaging_user_id", Column(std::move(eu_id))},
        {"engaging_user_follower_count", Column(std::move(eu_follower))},
        {"engaging_user_following_count", Column(std::move(eu_following))},
        {"engaging_user_is_verified", Column(std::move(eu_verified))},
        {"engaging_user_account_creation", Column(std::move(eu_creation))},
        {"engagee_follows_engager", Column(std::move(follows))},
        {"reply_timestamp", Column(std::move(engagement_ts[0]))},
        {"retweet_timestamp", Column(std::move(engagement_ts[1]))},
        {"retweet_with_comment_timestamp", Column(std::move(engagement_ts[2]))},
        {"like_timestamp", Column(std::move(engagement_ts[3]))},
    });
}

std::pair<ColumnTable, ColumnTable> split_by_week(const ColumnTable& table) {
    auto ts = table.i64("tweet_timestamp");
    if (ts.empty()) throw std::runtime_error("split_by_week: empty table");
    std::int64_t min_ts = *std::min_element(ts.begin(), ts.end());
    std::int64_t max_ts = *std::max_element(ts.begin(), ts.end());
    std::int64_t day0 = min_ts / kDay;
    std::int64_t days_covered = max_ts / kDay - day0 + 1;
    if (days_covered < 14) throw std::runtime_error("split_by_week: span covers fewer than 14 UTC days");

    std::int64_t boundary = (day0 + 7) * kDay;
    std::vector<std::size_t> first, second;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        (ts[i] < boundary ? first : second).push_back(i);
    }
    return {table.take_rows(first), table.take_rows(second)};
}

}  // namespace ctxengage
