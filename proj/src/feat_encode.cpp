#include "ctxengage/feat_encode.hpp"

#include <string>

namespace ctxengage {

namespace {

// Unix day 0 (1970-01-01) is a Thursday, the anchor weekday.
constexpr std::int64_t kDay = 86400;

std::int64_t count_tokens(const std::string& s, const std::string& token) {
    if (s.empty()) return 0;
    std::int64_t count = 0;
    std::size_t pos = 0;
    while (true) {
        std::size_t end = s.find(' ', pos);
        std::string_view piece(s.data() + pos, (end == std::string::npos ? s.size() : end) - pos);
        if (piece == token) ++count;
        if (end == std::string::npos) break;
        pos = end + 1;
    }
    return count;
}

// Months since 2006-03; earlier creations clamp to 0.
std::int64_t months_since_epoch(std::int64_t ts, std::size_t* clamped) {
    CivilDate d = civil_from_unix(ts);
    std::int64_t months = (static_cast<std::int64_t>(d.year) - 2006) * 12 + (static_cast<std::int64_t>(d.month) - 3);
    if (months < 0) {
        if (clamped) ++*clamped;
        return 0;
    }
    return months;
}

}  // namespace

CivilDate civil_from_unix(std::int64_t ts) {
    // Howard Hinnant's civil_from_days.
    std::int64_t z = ts / kDay - (ts % kDay < 0 ? 1 : 0);
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp < 10 ? mp + 3 : mp - 9;
    return {static_cast<int>(y + (m <= 2)), m, d};
}

ColumnTable derive_labels(const ColumnTable& table) {
    const std::size_t n = table.row_count();
    const auto& reply = table.i64_data("reply_timestamp");
    const auto& retweet = table.i64_data("retweet_timestamp");
    const auto& quote = table.i64_data("retweet_with_comment_timestamp");
    const auto& like = table.i64_data("like_timestamp");

    Int64Data like_l, reply_l, retweet_l, quote_l, react_l;
    like_l.values.resize(n);
    reply_l.values.resize(n);
    retweet_l.values.resize(n);
    quote_l.values.resize(n);
    react_l.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        like_l.values[i] = like.is_present(i);
        reply_l.values[i] = reply.is_present(i);
        retweet_l.values[i] = retweet.is_present(i);
        quote_l.values[i] = quote.is_present(i);
        react_l.values[i] = like_l.values[i] | reply_l.values[i] | retweet_l.values[i] | quote_l.values[i];
    }
    return table.with_columns({
        {"like", Column(std::move(like_l))},
        {"reply", Column(std::move(reply_l))},
        {"retweet", Column(std::move(retweet_l))},
        {"quote", Column(std::move(quote_l))},
        {"react", Column(std::move(react_l))},
    });
}

ColumnTable encode_media_and_elements(const ColumnTable& table) {
    const std::size_t n = table.row_count();
    const auto& media = table.strings("present_media");
    const auto& hashtags = table.sets("hashtags");
    const auto& links = table.sets("present_links");
    const auto& domains = table.sets("present_domains");

    Int64Data photos, videos, gifs, media_total, h_count, l_count, d_count;
    photos.values.resize(n);
    videos.values.resize(n);
    gifs.values.resize(n);
    media_total.values.resize(n);
    h_count.values.resize(n);
    l_count.values.resize(n);
    d_count.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        photos.values[i] = count_tokens(media[i], "Photo");
        videos.values[i] = count_tokens(media[i], "Video");
        gifs.values[i] = count_tokens(media[i], "GIF");
        media_total.values[i] = photos.values[i] + videos.values[i] + gifs.values[i];
        h_count.values[i] = static_cast<std::int64_t>(hashtags[i].size());
        l_count.values[i] = static_cast<std::int64_t>(links[i].size());
        d_count.values[i] = static_cast<std::int64_t>(domains[i].size());
    }
    return table.with_columns({
        {"photos_count", Column(std::move(photos))},
        {"videos_count", Column(std::move(videos))},
        {"gif_count", Column(std::move(gifs))},
        {"media_count", Column(std::move(media_total))},
        {"hashtags_count", Column(std::move(h_count))},
        {"links_count", Column(std::move(l_count))},
        {"domains_count", Column(std::move(d_count))},
    });
}

ColumnTable encode_time(const ColumnTable& table) {
    const auto ts = table.i64("tweet_timestamp");
    Int64Data weekday, hour;
    weekday.values.resize(ts.size());
    hour.values.resize(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
        weekday.values[i] = (ts[i] / kDay) % 7 + 1;
        hour.values[i] = (ts[i] % kDay) / 3600;
    }
    return table.with_columns({
        {"tweet_weekday", Column(std::move(weekday))},
        {"tweet_hour", Column(std::move(hour))},
    });
}

EncodeAgesResult encode_ages(const ColumnTable& table) {
    const auto engaged = table.i64("engaged_with_user_account_creation");
    const auto engaging = table.i64("engaging_user_account_creation");
    const std::size_t n = engaged.size();

    EncodeAgesResult out;
    Int64Data engaged_year, engaging_year, engaged_age, engaging_age, age_diff;
    engaged_year.values.resize(n);
    engaging_year.values.resize(n);
    engaged_age.values.resize(n);
    engaging_age.values.resize(n);
    age_diff.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        engaged_year.values[i] = civil_from_unix(engaged[i]).year;
        engaging_year.values[i] = civil_from_unix(engaging[i]).year;
        engaged_age.values[i] = months_since_epoch(engaged[i], &out.clamped_count);
        engaging_age.values[i] = months_since_epoch(engaging[i], &out.clamped_count);
        age_diff.values[i] = engaged_age.values[i] - engaging_age.values[i];
    }
    out.table = table.with_columns({
        {"engaged_creation_year", Column(std::move(engaged_year))},
        {"engaging_creation_year", Column(std::move(engaging_year))},
        {"engaged_age", Column(std::move(engaged_age))},
        {"engaging_age", Column(std::move(engaging_age))},
        {"creation_age_difference", Column(std::move(age_diff))},
    });
    return out;
}

ColumnTable encode_language_flag(const ColumnTable& table) {
    const auto& language = table.strings("language");
    Int64Data flag;
    flag.values.resize(language.size());
    for (std::size_t i = 0; i < language.size(); ++i)
        flag.values[i] = language[i] == kUnknownLanguageHash ? 1 : 0;
    return table.with_column("language_unknown", Column(std::move(flag)));
}

ColumnTable encode_all(const ColumnTable& table, std::size_t* clamped_count) {
    ColumnTable out = encode_media_and_elements(table);
    out = encode_time(out);
    auto ages = encode_ages(out);
    if (clamped_count) *clamped_count = ages.clamped_count;
    return encode_language_flag(ages.table);
}

}  // namespace ctxengage
