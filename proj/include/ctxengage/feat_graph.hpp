#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "ctxengage/column_table.hpp"

namespace ctxengage {

// Stage FE02: follow and engagement graphs, first and second degree.

// Directed user-to-user edges; engagement graphs carry per-edge counts.
class DirectedEdgeSet {
public:
    void add_edge(const std::string& src, const std::string& dst, std::int64_t count = 1);

    bool has_edge(const std::string& src, const std::string& dst) const;
    std::int64_t count(const std::string& src, const std::string& dst) const;
    std::size_t edge_count() const { return edges_; }

    // Distinct intermediaries b with (src, b) and (b, dst) both present.
    std::int64_t two_hop_count(const std::string& src, const std::string& dst) const;

    std::vector<std::pair<std::string, std::string>> edge_list() const;

    const std::unordered_map<std::string, std::unordered_map<std::string, std::int64_t>>& adjacency() const {
        return out_;
    }

private:
    std::unordered_map<std::string, std::unordered_map<std::string, std::int64_t>> out_;
    std::unordered_map<std::string, std::vector<std::string>> in_;
    std::size_t edges_ = 0;
};

// Follow graph over the given scope tables: author -> viewer present iff any
// instance asserts engagee_follows_engager (positive-case conflict rule);
// viewer -> author added for every instance.
DirectedEdgeSet build_follow_graph(const std::vector<const ColumnTable*>& tables);

// Materialized relational self-join: (a, c) iff some b has (a, b) and
// (b, c). Self-pairs are retained. Intended for small graphs and oracles;
// row annotation uses DirectedEdgeSet::two_hop_count lookups instead.
DirectedEdgeSet second_degree(const DirectedEdgeSet& edges);

// Engagement graph for one engagement type over a labeled history table:
// count(viewer -> author) = rows where the viewer engaged.
DirectedEdgeSet build_engagement_graph(const ColumnTable& history, const std::string& engagement);

struct GraphScopes {
    DirectedEdgeSet follow;
    // One graph per engagement type, in kEngagements order.
    std::vector<DirectedEdgeSet> engagement;
};

// Adds the 42 graph feature columns (2 second-degree follow flags plus
// 5 engagements x 2 directions x {1d,2d} x {flag,count}).
ColumnTable annotate_graph_features(const ColumnTable& table, const GraphScopes& graphs);

// Adds the two author/viewer follower-count ratios; zero denominator -> 0.
ColumnTable follower_ratios(const ColumnTable& table);

}  // namespace ctxengage
