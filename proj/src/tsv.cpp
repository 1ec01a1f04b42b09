#include "ctxengage/tsv.hpp"

#include <charconv>
#include <algorithm>
#include <array>
#include <istream>
#include <ostream>
#include <sstream>

namespace ctxengage {

namespace {

const std::array<std::string, 4> kTweetTypes = {"Retweet", "Quote", "Reply", "TopLevel"};
const std::array<std::string, 3> kMediaTypes = {"Photo", "Video", "GIF"};

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = s.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

std::int64_t parse_i64(const std::string& s, std::size_t line, std::size_t field) {
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
        throw ParseError(line, field, "expected integer, got '" + s + "'");
    return v;
}

std::int64_t parse_count(const std::string& s, std::size_t line, std::size_t field) {
    std::int64_t v = parse_i64(s, line, field);
    if (v < 0) throw ParseError(line, field, "negative count: " + s);
    return v;
}

std::int64_t parse_timestamp(const std::string& s, std::size_t line, std::size_t field) {
    std::int64_t v = parse_i64(s, line, field);
    if (v < 0) throw ParseError(line, field, "negative timestamp: " + s);
    return v;
}

bool parse_bool(const std::string& s, std::size_t line, std::size_t field) {
    if (s == "true") return true;
    if (s == "false") return false;
    throw ParseError(line, field, "expected true/false, got '" + s + "'");
}

std::vector<std::string> parse_set(const std::string& s, char sub_sep) {
    if (s.empty()) return {};
    auto tokens = split(s, sub_sep);
    std::sort(tokens.begin(), tokens.end());
    tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
    return tokens;
}

std::string normalize_media(const std::string& s, char sub_sep, std::size_t line, std::size_t field) {
    if (s.empty()) return {};
    auto tokens = split(s, sub_sep);
    for (const auto& t : tokens) {
        if (std::find(kMediaTypes.begin(), kMediaTypes.end(), t) == kMediaTypes.end())
            throw ParseError(line, field, "unknown media type: '" + t + "'");
    }
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) out += ' ';
        out += tokens[i];
    }
    return out;
}

struct RawColumns {
    StringData text_tokens, tweet_id, present_media, tweet_type, language;
    StringSetData hashtags, present_links, present_domains;
    Int64Data tweet_timestamp;
    StringData engaged_with_user_id, engaging_user_id;
    Int64Data ewu_follower, ewu_following, ewu_creation;
    Int64Data eu_follower, eu_following, eu_creation;
    BoolData ewu_verified, eu_verified, follows;
    Int64Data reply_ts, retweet_ts, quote_ts, like_ts;
};

void parse_optional_ts(Int64Data& col, const std::string& s, std::size_t line, std::size_t field) {
    if (s.empty()) {
        col.values.push_back(0);
        col.present.push_back(0);
    } else {
        col.values.push_back(parse_timestamp(s, line, field));
        col.present.push_back(1);
    }
}

}  // namespace

ParseError::ParseError(std::size_t line_, std::size_t field_, const std::string& what_)
    : std::runtime_error("line " + std::to_string(line_) + ", field " + std::to_string(field_) + ": " + what_),
      line(line_),
      field(field_) {}

const std::vector<std::string>& challenge_columns() {
    static const std::vector<std::string> cols = {
        "text_tokens",
        "hashtags",
        "tweet_id",
        "present_media",
        "present_links",
        "present_domains",
        "tweet_type",
        "language",
        "tweet_timestamp",
        "engaged_with_user_id",
        "engaged_with_user_follower_count",
        "engaged_with_user_following_count",
        "engaged_with_user_is_verified",
        "engaged_with_user_account_creation",
        "engaging_user_id",
        "engaging_user_follower_count",
        "engaging_user_following_count",
        "engaging_user_is_verified",
        "engaging_user_account_creation",
        "engagee_follows_engager",
        "reply_timestamp",
        "retweet_timestamp",
        "retweet_with_comment_timestamp",
        "like_timestamp",
    };
    return cols;
}

ColumnTable parse_tsv(std::istream& in, const TsvOptions& opts) {
    RawColumns c;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto fields = split(line, '\t');
        if (fields.size() != 24)
            throw ParseError(lineno, SIZE_MAX,
                             "expected 24 tab-separated fields, got " + std::to_string(fields.size()));

        c.text_tokens.push_back(fields[0]);
        c.hashtags.push_back(parse_set(fields[1], opts.sub_separator));
        c.tweet_id.push_back(fields[2]);
        c.present_media.push_back(normalize_media(fields[3], opts.sub_separator, lineno, 3));
        c.present_links.push_back(parse_set(fields[4], opts.sub_separator));
        c.present_domains.push_back(parse_set(fields[5], opts.sub_separator));
        if (std::find(kTweetTypes.begin(), kTweetTypes.end(), fields[6]) == kTweetTypes.end())
            throw ParseError(lineno, 6, "unknown tweet type: '" + fields[6] + "'");
        c.tweet_type.push_back(fields[6]);
        c.language.push_back(fields[7]);
        c.tweet_timestamp.values.push_back(parse_timestamp(fields[8], lineno, 8));
        c.engaged_with_user_id.push_back(fields[9]);
        c.ewu_follower.values.push_back(parse_count(fields[10], lineno, 10));
        c.ewu_following.values.push_back(parse_count(fields[11], lineno, 11));
        c.ewu_verified.push_back(parse_bool(fields[12], lineno, 12) ? 1 : 0);
        c.ewu_creation.values.push_back(parse_timestamp(fields[13], lineno, 13));
        c.engaging_user_id.push_back(fields[14]);
        c.eu_follower.values.push_back(parse_count(fields[15], lineno, 15));
        c.eu_following.values.push_back(parse_count(fields[16], lineno, 16));
        c.eu_verified.push_back(parse_bool(fields[17], lineno, 17) ? 1 : 0);
        c.eu_creation.values.push_back(parse_timestamp(fields[18], lineno, 18));
        c.follows.push_back(parse_bool(fields[19], lineno, 19) ? 1 : 0);
        parse_optional_ts(c.reply_ts, fields[20], lineno, 20);
        parse_optional_ts(c.retweet_ts, fields[21], lineno, 21);
        parse_optional_ts(c.quote_ts, fields[22], lineno, 22);
        parse_optional_ts(c.like_ts, fields[23], lineno, 23);
    }

    return ColumnTable::from_columns({
        {"text_tokens", Column(std::move(c.text_tokens))},
        {"hashtags", Column(std::move(c.hashtags))},
        {"tweet_id", Column(std::move(c.tweet_id))},
        {"present_media", Column(std::move(c.present_media))},
        {"present_links", Column(std::move(c.present_links))},
        {"present_domains", Column(std::move(c.present_domains))},
        {"tweet_type", Column(std::move(c.tweet_type))},
        {"language", Column(std::move(c.language))},
        {"tweet_timestamp", Column(std::move(c.tweet_timestamp))},
        {"engaged_with_user_id", Column(std::move(c.engaged_with_user_id))},
        {"engaged_with_user_follower_count", Column(std::move(c.ewu_follower))},
        {"engaged_with_user_following_count", Column(std::move(c.ewu_following))},
        {"engaged_with_user_is_verified", Column(std::move(c.ewu_verified))},
        {"engaged_with_user_account_creation", Column(std::move(c.ewu_creation))},
        {"engaging_user_id", Column(std::move(c.engaging_user_id))},
        {"engaging_user_follower_count", Column(std::move(c.eu_follower))},
        {"engaging_user_following_count", Column(std::move(c.eu_following))},
        {"engaging_user_is_verified", Column(std::move(c.eu_verified))},
        {"engaging_user_account_creation", Column(std::move(c.eu_creation))},
        {"engagee_follows_engager", Column(std::move(c.follows))},
        {"reply_timestamp", Column(std::move(c.reply_ts))},
        {"retweet_timestamp", Column(std::move(c.retweet_ts))},
        {"retweet_with_comment_timestamp", Column(std::move(c.quote_ts))},
        {"like_timestamp", Column(std::move(c.like_ts))},
    });
}

ColumnTable parse_tsv_string(const std::string& text, const TsvOptions& opts) {
    std::istringstream in(text);
    return parse_tsv(in, opts);
}

void serialize_tsv(const ColumnTable& table, std::ostream& out, const TsvOptions& opts) {
    const auto& cols = challenge_columns();
    for (const auto& name : cols) {
        if (!table.has_column(name)) throw std::runtime_error("not a challenge-schema table, missing " + name);
    }
    for (std::size_t r = 0; r < table.row_count(); ++r) {
        for (std::size_t ci = 0; ci < cols.size(); ++ci) {
            if (ci) out << '\t';
            const Column& col = table.column(cols[ci]);
            switch (col.type()) {
                case ColumnType::String:
                    if (cols[ci] == "present_media" && opts.sub_separator != ' ') {
                        // Stored space-joined; re-emit with the configured delimiter.
                        for (char ch : col.strings()[r]) out << (ch == ' ' ? opts.sub_separator : ch);
                    } else {
                        out << col.strings()[r];
                    }
                    break;
                case ColumnType::StringSet: {
                    const auto& set = col.sets()[r];
                    for (std::size_t i = 0; i < set.size(); ++i) {
                        if (i) out << opts.sub_separator;
                        out << set[i];
                    }
                    break;
                }
                case ColumnType::Bool: out << (col.bools()[r] ? "true" : "false"); break;
                case ColumnType::Int64: {
                    const auto& d = col.i64();
                    if (d.is_present(r)) out << d.values[r];
                    break;
                }
                case ColumnType::Float64: throw std::runtime_error("float column in challenge schema");
            }
        }
        out << '\n';
    }
}

std::string serialize_tsv_string(const ColumnTable& table, const TsvOptions& opts) {
    std::ostringstream out;
    serialize_tsv(table, out, opts);
    return out.str();
}

}  // namespace ctxengage
