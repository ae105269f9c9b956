#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hcpd {

using NodeId = std::uint32_t;
using CommunityId = std::uint32_t; // 1..k

struct Edge {
    NodeId u = 0;
    NodeId v = 0;
    double w = 1.0;
};

// One timestamped weighted graph over a shared node universe.
// Undirected snapshots store each unordered pair once (u < v after
// canonicalization); weights are finite and >= 0. A snapshot is "binary"
// when every weight equals 1.
struct Snapshot {
    int t = 1;
    bool directed = false;
    std::vector<NodeId> nodes; // sorted, unique
    std::vector<Edge> edges;

    bool is_binary() const;
    double total_weight() const;
    double max_weight() const;
};

// Ordered snapshot sequence t = 1..T over a common universe.
struct DynamicNetwork {
    std::vector<Snapshot> snapshots;
    std::vector<NodeId> node_universe; // sorted, unique
    int length() const { return static_cast<int>(snapshots.size()); }
};

// Total map node -> community id in {1..k}, fixed across the sequence.
class CommunityAssignment {
public:
    CommunityAssignment() = default;
    CommunityAssignment(std::vector<NodeId> nodes, std::vector<CommunityId> labels);

    CommunityId community_of(NodeId node) const;
    std::uint32_t community_count() const { return k_; }
    const std::vector<NodeId>& nodes() const { return nodes_; }
    const std::vector<CommunityId>& labels() const { return labels_; }

    // Members of community c (1-based), sorted by node id.
    std::vector<NodeId> members(CommunityId c) const;
    std::vector<std::uint32_t> community_sizes() const; // index c-1

    // Relabel communities to 1..k ordered by size descending, ties broken by
    // the smallest contained node id. Makes "community 1" the largest one.
    CommunityAssignment canonicalized() const;

private:
    std::vector<NodeId> nodes_;        // sorted
    std::vector<CommunityId> labels_;  // parallel to nodes_
    std::uint32_t k_ = 0;
    std::vector<std::uint32_t> dense_; // id -> label+1 lookup when ids are dense
    bool dense_ok_ = false;
    void build_index();
};

namespace detail {
class NodeIndex;
}

struct ValidationIssue {
    int t = 0;
    std::string message;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;
    bool ok() const { return issues.empty(); }
    std::string to_string() const;
};

// Checks the sequence invariants: t = 1..T without gaps, endpoints inside the
// universe, finite non-negative weights, no self-loops, no duplicate
// undirected pairs. Reports every violation with its t and offending edge.
ValidationReport validate(const DynamicNetwork& seq);

// Per-snapshot checks against a known universe (streaming-friendly subset of
// validate(); no cross-snapshot continuity check).
void validate_snapshot(const Snapshot& snap, const detail::NodeIndex& universe,
                       ValidationReport& report);

// Collapse communities to hyper-nodes 1..k. Hyper-edge (i, j), i != j, gets
// weight = (sum of inter-community edge weights between i and j) / (n_i*n_j);
// for a binary snapshot the numerator is the inter-edge count. Zero-mass
// pairs are omitted and intra-community mass is discarded entirely.
Snapshot contract(const Snapshot& g, const CommunityAssignment& assignment);

// Divide all weights by their sum so they total 1.
Snapshot normalize_weights(const Snapshot& g);

// Keep each edge independently with probability equal to its weight; kept
// edges become weight 1. Requires all weights in [0, 1].
Snapshot unweight(const Snapshot& g, std::uint64_t seed);

// Fold a directed snapshot to undirected: weight(u,v) = w(u->v) + w(v->u).
Snapshot symmetrize(const Snapshot& g);

// Intra-community subgraph: nodes of community c and the edges between them.
Snapshot induced_subgraph(const Snapshot& g, const CommunityAssignment& assignment,
                          CommunityId c);

// Weighted degree per node position (aligned with g.nodes).
std::vector<double> weighted_degrees(const Snapshot& g);

namespace detail {
// Position lookup for node ids; dense vector when ids are compact,
// binary search over the sorted id list otherwise.
class NodeIndex {
public:
    explicit NodeIndex(const std::vector<NodeId>& sorted_nodes);
    std::uint32_t position(NodeId id) const; // throws on unknown id
    bool contains(NodeId id) const;
    std::uint32_t size() const { return n_; }

private:
    const std::vector<NodeId>* nodes_;
    std::vector<std::uint32_t> dense_;
    std::uint32_t n_ = 0;
    bool dense_ok_ = false;
};
} // namespace detail

} // namespace hcpd
