#include "hcpd/community.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace hcpd {

double modularity(const Snapshot& g, const CommunityAssignment& assignment) {
    const double m = g.total_weight();
    if (m <= 0.0) throw std::invalid_argument("modularity: graph has zero total weight");
    const std::uint32_t k = assignment.community_count();
    std::vector<double> sum_in(k, 0.0);
    std::vector<double> sum_tot(k, 0.0);
    detail::NodeIndex index(g.nodes);
    std::vector<double> degree(g.nodes.size(), 0.0);
    std::vector<CommunityId> comm(g.nodes.size());
    for (std::size_t i = 0; i < g.nodes.size(); ++i) comm[i] = assignment.community_of(g.nodes[i]);
    for (const auto& e : g.edges) {
        auto pu = index.position(e.u);
        auto pv = index.position(e.v);
        degree[pu] += e.w;
        degree[pv] += e.w;
        if (comm[pu] == comm[pv]) sum_in[comm[pu] - 1] += e.w;
    }
    for (std::size_t i = 0; i < g.nodes.size(); ++i) sum_tot[comm[i] - 1] += degree[i];
    const double two_m = 2.0 * m;
    double q = 0.0;
    for (std::uint32_t c = 0; c < k; ++c)
        q += sum_in[c] / m - (sum_tot[c] / two_m) * (sum_tot[c] / two_m);
    return q;
}

namespace {

// Aggregated working graph for the contraction passes; self-loops carry the
// collapsed intra-community mass.
struct LevelGraph {
    std::uint32_t n = 0;
    std::vector<std::vector<std::pair<std::uint32_t, double>>> adj; // no self entries
    std::vector<double> self_loop;
    std::vector<double> degree; // includes 2 * self_loop
    double two_m = 0.0;
};

LevelGraph from_snapshot(const Snapshot& g) {
    detail::NodeIndex index(g.nodes);
    LevelGraph lg;
    lg.n = static_cast<std::uint32_t>(g.nodes.size());
    lg.adj.assign(lg.n, {});
    lg.self_loop.assign(lg.n, 0.0);
    lg.degree.assign(lg.n, 0.0);
    for (const auto& e : g.edges) {
        auto pu = index.position(e.u);
        auto pv = index.position(e.v);
        lg.adj[pu].push_back({pv, e.w});
        lg.adj[pv].push_back({pu, e.w});
        lg.degree[pu] += e.w;
        lg.degree[pv] += e.w;
    }
    for (std::uint32_t i = 0; i < lg.n; ++i) lg.two_m += lg.degree[i];
    return lg;
}

// One local-move phase. Returns true when at least one move was applied.
bool local_moves(const LevelGraph& g, std::vector<std::uint32_t>& comm, double tolerance) {
    const double m = g.two_m / 2.0;
    std::vector<double> sum_tot(g.n, 0.0);
    for (std::uint32_t u = 0; u < g.n; ++u) sum_tot[comm[u]] += g.degree[u];

    std::vector<double> weight_to(g.n, 0.0);
    bool any_move = false;
    bool improved = true;
    while (improved) {
        improved = false;
        for (std::uint32_t u = 0; u < g.n; ++u) {
            const std::uint32_t old_c = comm[u];
            std::vector<std::uint32_t> touched;
            touched.push_back(old_c);
            for (const auto& [v, w] : g.adj[u]) {
                if (weight_to[comm[v]] == 0.0 && comm[v] != old_c) touched.push_back(comm[v]);
                weight_to[comm[v]] += w;
            }
            sum_tot[old_c] -= g.degree[u];
            // gain of inserting u into community c, relative terms only
            auto gain = [&](std::uint32_t c) {
                return weight_to[c] / m - sum_tot[c] * g.degree[u] / (2.0 * m * m);
            };
            double best_gain = gain(old_c);
            std::uint32_t best_c = old_c;
            std::sort(touched.begin(), touched.end());
            for (std::uint32_t c : touched) {
                double gc = gain(c);
                if (gc > best_gain + tolerance) {
                    best_gain = gc;
                    best_c = c;
                }
            }
            sum_tot[best_c] += g.degree[u];
            if (best_c != old_c) {
                comm[u] = best_c;
                improved = true;
                any_move = true;
            }
            for (std::uint32_t c : touched) weight_to[c] = 0.0;
            weight_to[old_c] = 0.0;
        }
    }
    return any_move;
}

LevelGraph aggregate(const LevelGraph& g, const std::vector<std::uint32_t>& comm,
                     std::vector<std::uint32_t>& relabel) {
    relabel.assign(g.n, 0);
    std::vector<std::uint32_t> used;
    std::vector<std::int64_t> pos(g.n, -1);
    for (std::uint32_t u = 0; u < g.n; ++u) {
        if (pos[comm[u]] < 0) {
            pos[comm[u]] = static_cast<std::int64_t>(used.size());
            used.push_back(comm[u]);
        }
        relabel[u] = static_cast<std::uint32_t>(pos[comm[u]]);
    }
    LevelGraph out;
    out.n = static_cast<std::uint32_t>(used.size());
    out.adj.assign(out.n, {});
    out.self_loop.assign(out.n, 0.0);
    out.degree.assign(out.n, 0.0);
    std::vector<std::tuple<std::uint32_t, std::uint32_t, double>> cross;
    for (std::uint32_t u = 0; u < g.n; ++u) {
        std::uint32_t cu = relabel[u];
        out.self_loop[cu] += g.self_loop[u];
        for (const auto& [v, w] : g.adj[u]) {
            if (u >= v) continue; // each undirected edge once
            std::uint32_t cv = relabel[v];
            if (cu == cv)
                out.self_loop[cu] += w;
            else
                cross.emplace_back(std::min(cu, cv), std::max(cu, cv), w);
        }
    }
    std::sort(cross.begin(), cross.end(), [](const auto& a, const auto& b) {
        return std::make_pair(std::get<0>(a), std::get<1>(a)) <
               std::make_pair(std::get<0>(b), std::get<1>(b));
    });
    for (std::size_t i = 0; i < cross.size();) {
        auto [a, b, w] = cross[i];
        double sum = 0.0;
        while (i < cross.size() && std::get<0>(cross[i]) == a && std::get<1>(cross[i]) == b)
            sum += std::get<2>(cross[i++]);
        out.adj[a].push_back({b, sum});
        out.adj[b].push_back({a, sum});
        out.degree[a] += sum;
        out.degree[b] += sum;
    }
    for (std::uint32_t a = 0; a < out.n; ++a) out.degree[a] += 2.0 * out.self_loop[a];
    for (std::uint32_t a = 0; a < out.n; ++a) out.two_m += out.degree[a];
    return out;
}

} // namespace

PartitionResult louvain_partition(const Snapshot& g, std::uint64_t /*seed*/, double tolerance) {
    if (g.nodes.empty()) throw std::invalid_argument("louvain: empty snapshot");
    if (g.total_weight() <= 0.0)
        throw std::invalid_argument("louvain: graph has zero total weight");

    LevelGraph level = from_snapshot(g);
    // membership of original nodes in the current level's node space
    std::vector<std::uint32_t> membership(level.n);
    for (std::uint32_t i = 0; i < level.n; ++i) membership[i] = i;

    int levels = 0;
    for (;;) {
        std::vector<std::uint32_t> comm(level.n);
        for (std::uint32_t i = 0; i < level.n; ++i) comm[i] = i;
        bool moved = local_moves(level, comm, tolerance);
        if (!moved) break;
        std::vector<std::uint32_t> relabel;
        LevelGraph next = aggregate(level, comm, relabel);
        for (auto& mem : membership) mem = relabel[comm[mem]];
        ++levels;
        if (next.n == level.n) break;
        level = std::move(next);
    }

    std::vector<CommunityId> labels(g.nodes.size());
    for (std::size_t i = 0; i < g.nodes.size(); ++i) labels[i] = membership[i] + 1;
    CommunityAssignment assignment(g.nodes, labels);
    PartitionResult result;
    result.assignment = assignment.canonicalized();
    result.modularity = modularity(g, result.assignment);
    result.levels = levels;
    return result;
}

} // namespace hcpd
