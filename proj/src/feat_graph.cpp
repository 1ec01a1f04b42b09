#include "ctxengage/feat_graph.hpp"

#include <algorithm>

#include "ctxengage/registry.hpp"

namespace ctxengage {

void DirectedEdgeSet::add_edge(const std::string& src, const std::string& dst, std::int64_t count) {
    auto& slot = out_[src][dst];
    if (slot == 0) {
        in_[dst].push_back(src);
        ++edges_;
    }
    slot += count;
}

bool DirectedEdgeSet::has_edge(const std::string& src, const std::string& dst) const {
    auto it = out_.find(src);
    return it != out_.end() && it->second.count(dst) != 0;
}

std::int64_t DirectedEdgeSet::count(const std::string& src, const std::string& dst) const {
    auto it = out_.find(src);
    if (it == out_.end()) return 0;
    auto jt = it->second.find(dst);
    return jt == it->second.end() ? 0 : jt->second;
}

std::int64_t DirectedEdgeSet::two_hop_count(const std::string& src, const std::string& dst) const {
    auto out_it = out_.find(src);
    auto in_it = in_.find(dst);
    if (out_it == out_.end() || in_it == in_.end()) return 0;
    // Scan the smaller side of the intersection.
    if (in_it->second.size() <= out_it->second.size()) {
        std::int64_t n = 0;
        for (const auto& b : in_it->second)
            if (out_it->second.count(b)) ++n;
        return n;
    }
    std::int64_t n = 0;
    auto dst_in = std::unordered_set<std::string>(in_it->second.begin(), in_it->second.end());
    for (const auto& [b, cnt] : out_it->second)
        if (dst_in.count(b)) ++n;
    return n;
}

std::vector<std::pair<std::string, std::string>> DirectedEdgeSet::edge_list() const {
    std::vector<std::pair<std::string, std::string>> out;
    out.reserve(edges_);
    for (const auto& [src, dsts] : out_)
        for (const auto& [dst, cnt] : dsts) out.emplace_back(src, dst);
    std::sort(out.begin(), out.end());
    return out;
}

DirectedEdgeSet build_follow_graph(const std::vector<const ColumnTable*>& tables) {
    DirectedEdgeSet g;
    for (const auto* table : tables) {
        const auto& authors = table->strings("engaged_with_user_id");
        const auto& viewers = table->strings("engaging_user_id");
        const auto follows = table->bools("engagee_follows_engager");
        for (std::size_t i = 0; i < authors.size(); ++i) {
            // The viewer always follows the author by dataset construction.
            if (!g.has_edge(viewers[i], authors[i])) g.add_edge(viewers[i], authors[i]);
            if (follows[i] && !g.has_edge(authors[i], viewers[i])) g.add_edge(authors[i], viewers[i]);
        }
    }
    return g;
}

DirectedEdgeSet second_degree(const DirectedEdgeSet& edges) {
    DirectedEdgeSet out;
    for (const auto& [a, mids] : edges.adjacency()) {
        for (const auto& [b, cnt_ab] : mids) {
            auto it = edges.adjacency().find(b);
            if (it == edges.adjacency().end()) continue;
            for (const auto& [c, cnt_bc] : it->second) {
                if (!out.has_edge(a, c)) out.add_edge(a, c);
            }
        }
    }
    return out;
}

DirectedEdgeSet build_engagement_graph(const ColumnTable& history, const std::string& engagement) {
    DirectedEdgeSet g;
    const auto& authors = history.strings("engaged_with_user_id");
    const auto& viewers = history.strings("engaging_user_id");
    const auto labels = history.i64(engagement);
    for (std::size_t i = 0; i < authors.size(); ++i) {
        if (labels[i]) g.add_edge(viewers[i], authors[i], 1);
    }
    return g;
}

ColumnTable annotate_graph_features(const ColumnTable& table, const GraphScopes& graphs) {
    if (graphs.engagement.size() != kEngagements.size())
        throw std::runtime_error("annotate_graph_features: need one graph per engagement type");
    const std::size_t n = table.row_count();
    const auto& authors = table.strings("engaged_with_user_id");
    const auto& viewers = table.strings("engaging_user_id");

    BoolData follow_ee(n), follow_er(n);
    // Memoized per distinct pair: rows repeat pairs heavily.
    std::unordered_map<std::string, std::pair<std::uint8_t, std::uint8_t>> follow_memo;
    for (std::size_t i = 0; i < n; ++i) {
        std::string key = authors[i] + '\x1f' + viewers[i];
        auto it = follow_memo.find(key);
        if (it == follow_memo.end()) {
            std::uint8_t ee = graphs.follow.two_hop_count(authors[i], viewers[i]) > 0;
            std::uint8_t er = graphs.follow.two_hop_count(viewers[i], authors[i]) > 0;
            it = follow_memo.emplace(key, std::make_pair(ee, er)).first;
        }
        follow_ee[i] = it->second.first;
        follow_er[i] = it->second.second;
    }

    std::vector<std::pair<std::string, Column>> cols;
    cols.emplace_back("graph_engagee_follows_engager_2d", Column(std::move(follow_ee)));
    cols.emplace_back("graph_engager_follows_engagee_2d", Column(std::move(follow_er)));

    for (const char* degree : {"1d", "2d"}) {
        const bool second = degree == std::string("2d");
        for (const char* direction : {"engaging", "engaged"}) {
            const bool viewer_to_author = direction == std::string("engaging");
            const std::string from = viewer_to_author ? "engaged" : "engaging";
            for (std::size_t e = 0; e < kEngagements.size(); ++e) {
                const auto& g = graphs.engagement[e];
                Int64Data counts;
                counts.values.resize(n);
                std::unordered_map<std::string, std::int64_t> memo;
                for (std::size_t i = 0; i < n; ++i) {
                    const std::string& src = viewer_to_author ? viewers[i] : authors[i];
                    const std::string& dst = viewer_to_author ? authors[i] : viewers[i];
                    std::int64_t v;
                    if (second) {
                        std::string key = src + '\x1f' + dst;
                        auto it = memo.find(key);
                        if (it == memo.end()) it = memo.emplace(key, g.two_hop_count(src, dst)).first;
                        v = it->second;
                    } else {
                        v = g.count(src, dst);
                    }
                    counts.values[i] = v;
                }
                BoolData flags(n);
                for (std::size_t i = 0; i < n; ++i) flags[i] = counts.values[i] >= 1;
                cols.emplace_back(
                    "graph_" + std::string(direction) + "_flag_" + kEngagements[e] + "_from_" + from + "_" + degree,
                    Column(std::move(flags)));
                cols.emplace_back(
                    "graph_" + std::string(direction) + "_count_" + kEngagements[e] + "_from_" + from + "_" + degree,
                    Column(std::move(counts)));
            }
        }
    }
    return table.with_columns(cols);
}

ColumnTable follower_ratios(const ColumnTable& table) {
    const std::size_t n = table.row_count();
    auto ratio_of = [&](const std::string& num_col, const std::string& den_col) {
        auto num = table.i64(num_col);
        auto den = table.i64(den_col);
        Float64Data out(n);
        for (std::size_t i = 0; i < n; ++i)
            out[i] = den[i] == 0 ? 0.0 : static_cast<double>(num[i]) / static_cast<double>(den[i]);
        return Column(std::move(out));
    };
    return table.with_columns({
        {"ratio_engaged_to_engaging_follower_counts",
         ratio_of("engaged_with_user_follower_count", "engaging_user_follower_count")},
        {"ratio_engaged_to_engaging_following_counts",
         ratio_of("engaged_with_user_following_count", "engaging_user_following_count")},
    });
}

}  // namespace ctxengage
