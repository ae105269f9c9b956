#include <doctest.h>

#include <algorithm>

#include "hcpd/community.hpp"
#include "hcpd/generators.hpp"
#include "hcpd/rng.hpp"
#include "oracles.hpp"

using namespace hcpd;

namespace {

Snapshot clique_pair(std::uint32_t clique_size) {
    // two cliques joined by a single bridge edge 0 -- clique_size
    Snapshot g;
    g.t = 1;
    const std::uint32_t n = 2 * clique_size;
    g.nodes.resize(n);
    for (std::uint32_t i = 0; i < n; ++i) g.nodes[i] = i;
    auto add_clique = [&](std::uint32_t from) {
        for (std::uint32_t u = from; u < from + clique_size; ++u)
            for (std::uint32_t v = u + 1; v < from + clique_size; ++v)
                g.edges.push_back({u, v, 1.0});
    };
    add_clique(0);
    add_clique(clique_size);
    g.edges.push_back({0, clique_size, 1.0});
    return g;
}

} // namespace

TEST_CASE("modularity hand values") {
    SUBCASE("single edge, one community: Q = 0") {
        Snapshot g;
        g.nodes = {0, 1};
        g.edges = {{0, 1, 1.0}};
        CommunityAssignment a({0, 1}, {1, 1});
        CHECK(modularity(g, a) == doctest::Approx(0.0).epsilon(1e-15));
    }
    SUBCASE("single edge, separate communities: Q = -0.5") {
        Snapshot g;
        g.nodes = {0, 1};
        g.edges = {{0, 1, 1.0}};
        CommunityAssignment a({0, 1}, {1, 2});
        CHECK(modularity(g, a) == doctest::Approx(-0.5).epsilon(1e-15));
    }
    SUBCASE("two disjoint triangles, each its own community: Q = 0.5") {
        Snapshot g;
        g.nodes = {0, 1, 2, 3, 4, 5};
        g.edges = {{0, 1, 1}, {1, 2, 1}, {0, 2, 1}, {3, 4, 1}, {4, 5, 1}, {3, 5, 1}};
        CommunityAssignment a({0, 1, 2, 3, 4, 5}, {1, 1, 1, 2, 2, 2});
        CHECK(modularity(g, a) == doctest::Approx(0.5).epsilon(1e-15));

        // brute force: no partition of the six nodes scores higher
        double best = -1.0;
        for (const auto& labels : oracles::all_partitions(6)) {
            std::vector<CommunityId> ls(6);
            for (int i = 0; i < 6; ++i) ls[i] = labels[i] + 1;
            best = std::max(best, modularity(g, CommunityAssignment(g.nodes, ls)));
        }
        CHECK(best == doctest::Approx(0.5).epsilon(1e-12));
    }
}

TEST_CASE("modularity is invariant under label permutation") {
    Rng rng(17);
    auto g = oracles::random_snapshot(rng, 12, 0.4);
    std::vector<CommunityId> labels(12);
    for (auto& l : labels) l = 1 + static_cast<CommunityId>(rng.next_below(3));
    labels[0] = 1;
    labels[1] = 2;
    labels[2] = 3;
    CommunityAssignment a(g.nodes, labels);
    // swap labels 1 <-> 3
    std::vector<CommunityId> swapped(labels);
    for (auto& l : swapped) l = l == 1 ? 3 : (l == 3 ? 1 : l);
    CommunityAssignment b(g.nodes, swapped);
    CHECK(modularity(g, a) == doctest::Approx(modularity(g, b)).epsilon(1e-15));
}

TEST_CASE("louvain recovers two 3-cliques against brute-force maximization") {
    Snapshot g = clique_pair(3);
    PartitionResult res = louvain_partition(g, 0);

    // oracle: enumerate all 203 partitions of 6 nodes and take the best Q
    double best_q = -1.0;
    std::vector<CommunityId> best_labels;
    for (const auto& labels : oracles::all_partitions(6)) {
        std::vector<CommunityId> ls(6);
        for (int i = 0; i < 6; ++i) ls[i] = labels[i] + 1;
        double q = modularity(g, CommunityAssignment(g.nodes, ls));
        if (q > best_q) {
            best_q = q;
            best_labels = ls;
        }
    }
    CHECK(res.modularity == doctest::Approx(best_q).epsilon(1e-9));
    // the optimum is the two cliques
    CHECK(best_labels[0] == best_labels[1]);
    CHECK(best_labels[0] == best_labels[2]);
    CHECK(best_labels[3] == best_labels[4]);
    CHECK(res.assignment.community_count() == 2);
    CHECK(res.assignment.community_of(0) == res.assignment.community_of(2));
    CHECK(res.assignment.community_of(3) == res.assignment.community_of(5));
    CHECK(res.assignment.community_of(0) != res.assignment.community_of(3));
}

TEST_CASE("louvain separates two 10-cliques joined by a bridge") {
    Snapshot g = clique_pair(10);
    PartitionResult res = louvain_partition(g, 1);
    REQUIRE(res.assignment.community_count() == 2);
    for (NodeId u = 1; u < 10; ++u)
        CHECK(res.assignment.community_of(u) == res.assignment.community_of(0));
    for (NodeId u = 11; u < 20; ++u)
        CHECK(res.assignment.community_of(u) == res.assignment.community_of(10));
    CHECK(res.assignment.community_of(0) != res.assignment.community_of(10));
}

TEST_CASE("louvain never merges across disconnected components") {
    Snapshot g;
    g.nodes = {0, 1, 2, 3, 4, 5};
    g.edges = {{0, 1, 1.0}, {2, 3, 1.0}, {4, 5, 1.0}};
    PartitionResult res = louvain_partition(g, 0);
    CHECK(res.assignment.community_count() >= 3);
    CHECK(res.assignment.community_of(0) != res.assignment.community_of(2));
    CHECK(res.assignment.community_of(2) != res.assignment.community_of(4));
    CHECK(res.assignment.community_of(0) != res.assignment.community_of(4));
}

TEST_CASE("louvain recovers planted blocks of a contrastive SBM sample") {
    // 4 blocks of 25, diagonal 0.3, off-diagonal 0.05
    SbmConfig cfg;
    cfg.community_sizes = {25, 25, 25, 25};
    cfg.block_matrix.assign(4, std::vector<double>(4, 0.05));
    for (int i = 0; i < 4; ++i) cfg.block_matrix[i][i] = 0.3;
    cfg.trials = 1; // binary snapshot
    auto [net, truth] = sbm_generate(cfg, 1, {}, 99);
    PartitionResult res = louvain_partition(net.snapshots[0], 0);

    REQUIRE(res.assignment.community_count() == 4);
    // count nodes whose recovered community matches the planted one up to the
    // best label correspondence (communities are canonical by size, so match
    // greedily by overlap)
    int agree = 0;
    for (CommunityId planted = 1; planted <= 4; ++planted) {
        std::vector<int> overlap(5, 0);
        for (NodeId u = (planted - 1) * 25; u < planted * 25; ++u)
            overlap[res.assignment.community_of(u)]++;
        agree += *std::max_element(overlap.begin(), overlap.end());
    }
    CHECK(agree >= 95);
}

TEST_CASE("louvain output is a fixed point: no single move improves Q") {
    Snapshot g = clique_pair(4);
    PartitionResult res = louvain_partition(g, 0);
    const double q0 = res.modularity;
    const std::uint32_t k = res.assignment.community_count();
    for (NodeId u : g.nodes) {
        for (CommunityId c = 1; c <= k; ++c) {
            if (c == res.assignment.community_of(u)) continue;
            std::vector<CommunityId> labels;
            for (NodeId v : g.nodes) labels.push_back(res.assignment.community_of(v));
            labels[u] = c;
            bool all_nonempty = true;
            for (CommunityId cc = 1; cc <= k; ++cc)
                if (std::count(labels.begin(), labels.end(), cc) == 0) all_nonempty = false;
            if (!all_nonempty) continue;
            CHECK(modularity(g, CommunityAssignment(g.nodes, labels)) <= q0 + 1e-7);
        }
    }
}

TEST_CASE("louvain and modularity reject empty graphs") {
    Snapshot g;
    g.nodes = {0, 1};
    CHECK_THROWS(louvain_partition(g, 0));
    CommunityAssignment a({0, 1}, {1, 1});
    CHECK_THROWS(modularity(g, a));
}
