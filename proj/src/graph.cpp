#include "hcpd/graph.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "hcpd/rng.hpp"

namespace hcpd {

bool Snapshot::is_binary() const {
    for (const auto& e : edges)
        if (e.w != 1.0) return false;
    return true;
}

double Snapshot::total_weight() const {
    double s = 0.0;
    for (const auto& e : edges) s += e.w;
    return s;
}

double Snapshot::max_weight() const {
    double m = 0.0;
    for (const auto& e : edges) m = std::max(m, e.w);
    return m;
}

namespace detail {

NodeIndex::NodeIndex(const std::vector<NodeId>& sorted_nodes) : nodes_(&sorted_nodes) {
    n_ = static_cast<std::uint32_t>(sorted_nodes.size());
    if (n_ == 0) return;
    NodeId max_id = sorted_nodes.back();
    // dense table only when it stays proportional to the node count
    if (static_cast<std::uint64_t>(max_id) < 4ULL * n_ + 64) {
        dense_.assign(max_id + 1, UINT32_MAX);
        for (std::uint32_t i = 0; i < n_; ++i) dense_[sorted_nodes[i]] = i;
        dense_ok_ = true;
    }
}

std::uint32_t NodeIndex::position(NodeId id) const {
    if (dense_ok_) {
        if (id < dense_.size() && dense_[id] != UINT32_MAX) return dense_[id];
    } else {
        auto it = std::lower_bound(nodes_->begin(), nodes_->end(), id);
        if (it != nodes_->end() && *it == id)
            return static_cast<std::uint32_t>(it - nodes_->begin());
    }
    throw std::invalid_argument("unknown node id " + std::to_string(id));
}

bool NodeIndex::contains(NodeId id) const {
    if (dense_ok_) return id < dense_.size() && dense_[id] != UINT32_MAX;
    return std::binary_search(nodes_->begin(), nodes_->end(), id);
}

} // namespace detail

CommunityAssignment::CommunityAssignment(std::vector<NodeId> nodes,
                                         std::vector<CommunityId> labels)
    : nodes_(std::move(nodes)), labels_(std::move(labels)) {
    if (nodes_.size() != labels_.size())
        throw std::invalid_argument("assignment: nodes/labels size mismatch");
    // keep (node, label) pairs sorted by node id
    std::vector<std::uint32_t> order(nodes_.size());
    for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::uint32_t a, std::uint32_t b) { return nodes_[a] < nodes_[b]; });
    std::vector<NodeId> n2(nodes_.size());
    std::vector<CommunityId> l2(nodes_.size());
    for (std::uint32_t i = 0; i < order.size(); ++i) {
        n2[i] = nodes_[order[i]];
        l2[i] = labels_[order[i]];
    }
    nodes_ = std::move(n2);
    labels_ = std::move(l2);
    for (std::size_t i = 1; i < nodes_.size(); ++i)
        if (nodes_[i] == nodes_[i - 1])
            throw std::invalid_argument("assignment: duplicate node id");
    build_index();
}

void CommunityAssignment::build_index() {
    k_ = 0;
    for (CommunityId c : labels_) {
        if (c == 0) throw std::invalid_argument("assignment: community ids start at 1");
        k_ = std::max(k_, c);
    }
    if (!labels_.empty()) {
        std::vector<bool> seen(k_ + 1, false);
        for (CommunityId c : labels_) seen[c] = true;
        for (CommunityId c = 1; c <= k_; ++c)
            if (!seen[c])
                throw std::invalid_argument("assignment: empty community " + std::to_string(c));
    }
    dense_ok_ = false;
    dense_.clear();
    if (!nodes_.empty()) {
        NodeId max_id = nodes_.back();
        if (static_cast<std::uint64_t>(max_id) < 4ULL * nodes_.size() + 64) {
            dense_.assign(max_id + 1, 0);
            for (std::size_t i = 0; i < nodes_.size(); ++i) dense_[nodes_[i]] = labels_[i];
            dense_ok_ = true;
        }
    }
}

CommunityId CommunityAssignment::community_of(NodeId node) const {
    if (dense_ok_) {
        if (node < dense_.size() && dense_[node] != 0) return dense_[node];
    } else {
        auto it = std::lower_bound(nodes_.begin(), nodes_.end(), node);
        if (it != nodes_.end() && *it == node) return labels_[it - nodes_.begin()];
    }
    throw std::invalid_argument("node " + std::to_string(node) + " has no community");
}

std::vector<NodeId> CommunityAssignment::members(CommunityId c) const {
    std::vector<NodeId> out;
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        if (labels_[i] == c) out.push_back(nodes_[i]);
    return out;
}

std::vector<std::uint32_t> CommunityAssignment::community_sizes() const {
    std::vector<std::uint32_t> sizes(k_, 0);
    for (CommunityId c : labels_) sizes[c - 1]++;
    return sizes;
}

CommunityAssignment CommunityAssignment::canonicalized() const {
    auto sizes = community_sizes();
    std::vector<NodeId> min_node(k_, UINT32_MAX);
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        min_node[labels_[i] - 1] = std::min(min_node[labels_[i] - 1], nodes_[i]);
    std::vector<CommunityId> order(k_);
    for (CommunityId c = 0; c < k_; ++c) order[c] = c;
    std::sort(order.begin(), order.end(), [&](CommunityId a, CommunityId b) {
        if (sizes[a] != sizes[b]) return sizes[a] > sizes[b];
        return min_node[a] < min_node[b];
    });
    std::vector<CommunityId> remap(k_, 0);
    for (CommunityId rank = 0; rank < k_; ++rank) remap[order[rank]] = rank + 1;
    std::vector<CommunityId> new_labels(labels_.size());
    for (std::size_t i = 0; i < labels_.size(); ++i) new_labels[i] = remap[labels_[i] - 1];
    return CommunityAssignment(nodes_, std::move(new_labels));
}

std::string ValidationReport::to_string() const {
    if (ok()) return "ok";
    std::ostringstream os;
    for (std::size_t i = 0; i < issues.size(); ++i) {
        if (i) os << "; ";
        os << "t=" << issues[i].t << ": " << issues[i].message;
    }
    return os.str();
}

void validate_snapshot(const Snapshot& snap, const detail::NodeIndex& universe,
                       ValidationReport& report) {
    for (NodeId n : snap.nodes)
        if (!universe.contains(n))
            report.issues.push_back({snap.t, "node " + std::to_string(n) + " outside universe"});
    std::set<std::pair<NodeId, NodeId>> seen;
    for (const auto& e : snap.edges) {
        std::string edge_str =
            "edge (" + std::to_string(e.u) + "," + std::to_string(e.v) + ")";
        if (!universe.contains(e.u) || !universe.contains(e.v))
            report.issues.push_back({snap.t, edge_str + " endpoint outside universe"});
        if (e.u == e.v) report.issues.push_back({snap.t, "self-loop at " + edge_str});
        if (std::isnan(e.w) || std::isinf(e.w))
            report.issues.push_back({snap.t, "non-finite weight at " + edge_str});
        else if (e.w < 0.0)
            report.issues.push_back(
                {snap.t, "negative weight " + std::to_string(e.w) + " at " + edge_str});
        if (!snap.directed) {
            auto key = std::minmax(e.u, e.v);
            if (!seen.insert({key.first, key.second}).second)
                report.issues.push_back({snap.t, "duplicate undirected " + edge_str});
        }
    }
}

ValidationReport validate(const DynamicNetwork& seq) {
    ValidationReport report;
    detail::NodeIndex universe(seq.node_universe);
    int expected_t = 1;
    for (const auto& snap : seq.snapshots) {
        if (snap.t != expected_t) {
            report.issues.push_back({expected_t, "gap in time indices (expected t=" +
                                                     std::to_string(expected_t) + ", found t=" +
                                                     std::to_string(snap.t) + ")"});
            expected_t = snap.t;
        }
        ++expected_t;
        validate_snapshot(snap, universe, report);
    }
    return report;
}

Snapshot contract(const Snapshot& g, const CommunityAssignment& assignment) {
    const std::uint32_t k = assignment.community_count();
    if (k == 0) throw std::invalid_argument("contract: empty assignment");
    auto sizes = assignment.community_sizes();
    for (CommunityId c = 1; c <= k; ++c)
        if (sizes[c - 1] == 0)
            throw std::invalid_argument("contract: empty community " + std::to_string(c));

    // accumulate inter-community mass per unordered hyper-pair
    std::vector<double> mass(static_cast<std::size_t>(k) * k, 0.0);
    for (const auto& e : g.edges) {
        CommunityId ci = assignment.community_of(e.u);
        CommunityId cj = assignment.community_of(e.v);
        if (ci == cj) continue; // intra mass handled by the per-community path
        auto [lo, hi] = std::minmax(ci, cj);
        mass[static_cast<std::size_t>(lo - 1) * k + (hi - 1)] += e.w;
    }

    Snapshot out;
    out.t = g.t;
    out.directed = false;
    out.nodes.resize(k);
    for (CommunityId c = 1; c <= k; ++c) out.nodes[c - 1] = c;
    for (CommunityId i = 1; i <= k; ++i)
        for (CommunityId j = i + 1; j <= k; ++j) {
            double w = mass[static_cast<std::size_t>(i - 1) * k + (j - 1)];
            if (w == 0.0) continue;
            double denom = static_cast<double>(sizes[i - 1]) * static_cast<double>(sizes[j - 1]);
            out.edges.push_back({i, j, w / denom});
        }
    return out;
}

Snapshot normalize_weights(const Snapshot& g) {
    double total = g.total_weight();
    if (total <= 0.0)
        throw std::invalid_argument("normalize_weights: snapshot has zero total weight");
    Snapshot out = g;
    for (auto& e : out.edges) e.w /= total;
    return out;
}

Snapshot unweight(const Snapshot& g, std::uint64_t seed) {
    for (const auto& e : g.edges)
        if (e.w > 1.0)
            throw std::invalid_argument("unweight: weight > 1 at edge (" +
                                        std::to_string(e.u) + "," + std::to_string(e.v) + ")");
    Rng rng(derive_seed(seed, "unweight", static_cast<std::uint64_t>(g.t)));
    Snapshot out;
    out.t = g.t;
    out.directed = g.directed;
    out.nodes = g.nodes;
    out.edges.reserve(g.edges.size());
    for (const auto& e : g.edges) {
        if (e.w <= 0.0) continue;
        if (e.w >= 1.0 || rng.bernoulli(e.w)) out.edges.push_back({e.u, e.v, 1.0});
    }
    return out;
}

Snapshot symmetrize(const Snapshot& g) {
    std::map<std::pair<NodeId, NodeId>, double> acc;
    for (const auto& e : g.edges) {
        auto key = std::minmax(e.u, e.v);
        acc[{key.first, key.second}] += e.w;
    }
    Snapshot out;
    out.t = g.t;
    out.directed = false;
    out.nodes = g.nodes;
    out.edges.reserve(acc.size());
    for (const auto& [pair, w] : acc) out.edges.push_back({pair.first, pair.second, w});
    return out;
}

Snapshot induced_subgraph(const Snapshot& g, const CommunityAssignment& assignment,
                          CommunityId c) {
    Snapshot out;
    out.t = g.t;
    out.directed = g.directed;
    out.nodes = assignment.members(c);
    for (const auto& e : g.edges)
        if (assignment.community_of(e.u) == c && assignment.community_of(e.v) == c)
            out.edges.push_back(e);
    return out;
}

std::vector<double> weighted_degrees(const Snapshot& g) {
    detail::NodeIndex index(g.nodes);
    std::vector<double> deg(g.nodes.size(), 0.0);
    for (const auto& e : g.edges) {
        deg[index.position(e.u)] += e.w;
        if (e.u != e.v) deg[index.position(e.v)] += e.w;
    }
    return deg;
}

} // namespace hcpd
