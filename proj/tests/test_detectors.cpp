#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "hcpd/detectors.hpp"
#include "hcpd/rng.hpp"
#include "hcpd/thresholding.hpp"
#include "oracles.hpp"

using namespace hcpd;

namespace {

Snapshot path_graph(std::uint32_t n, int t = 1) {
    Snapshot g;
    g.t = t;
    g.nodes.resize(n);
    for (std::uint32_t i = 0; i < n; ++i) g.nodes[i] = i;
    for (std::uint32_t i = 0; i + 1 < n; ++i) g.edges.push_back({i, i + 1, 1.0});
    return g;
}

Snapshot without_edge(const Snapshot& g, NodeId u, NodeId v) {
    Snapshot out = g;
    out.edges.erase(std::remove_if(out.edges.begin(), out.edges.end(),
                                   [&](const Edge& e) {
                                       return (e.u == u && e.v == v) ||
                                              (e.u == v && e.v == u);
                                   }),
                    out.edges.end());
    return out;
}

} // namespace

TEST_CASE("deltacon: identical snapshots score zero") {
    Rng rng(2);
    auto g = oracles::random_snapshot(rng, 15, 0.3);
    DetectorConfig cfg;
    cfg.epsilon_affinity = 0.05;
    CHECK(deltacon_score(g, g, cfg) == 0.0);
}

TEST_CASE("deltacon: empty vs empty is zero (affinities are the identity)") {
    Snapshot a, b;
    a.nodes = b.nodes = {0, 1, 2, 3, 4};
    DetectorConfig cfg;
    CHECK(deltacon_score(a, b, cfg) == 0.0);
    DenseMatrix s = deltacon_affinity(a, a.nodes, 0.05);
    for (std::uint32_t i = 0; i < 5; ++i)
        for (std::uint32_t j = 0; j < 5; ++j)
            CHECK(s.at(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));
}

TEST_CASE("deltacon: central edge removal scores above leaf-adjacent removal") {
    // 20-node path, epsilon 0.05; oracle solves both systems by Gauss-Jordan
    Snapshot p = path_graph(20);
    Snapshot central = without_edge(p, 9, 10);
    Snapshot leafish = without_edge(p, 0, 1);
    DetectorConfig cfg;
    cfg.epsilon_affinity = 0.05;

    double d_central = deltacon_score(p, central, cfg);
    double d_leaf = deltacon_score(p, leafish, cfg);
    CHECK(d_central > 0.0);
    CHECK(d_central > d_leaf);

    // cross-check both distances against the independent dense solver
    auto oracle_distance = [&](const Snapshot& a, const Snapshot& b) {
        auto s1 = oracles::gauss_affinity(a, p.nodes, 0.05);
        auto s2 = oracles::gauss_affinity(b, p.nodes, 0.05);
        double sum = 0.0;
        for (std::size_t i = 0; i < s1.size(); ++i)
            for (std::size_t j = 0; j < s1.size(); ++j) {
                double d = std::sqrt(std::max(0.0, s1[i][j])) -
                           std::sqrt(std::max(0.0, s2[i][j]));
                sum += d * d;
            }
        return std::sqrt(sum);
    };
    CHECK(d_central == doctest::Approx(oracle_distance(p, central)).epsilon(1e-10));
    CHECK(d_leaf == doctest::Approx(oracle_distance(p, leafish)).epsilon(1e-10));
}

TEST_CASE("deltacon: symmetry, zero-iff-equal and relabel invariance on random graphs") {
    Rng rng(31);
    DetectorConfig cfg;
    cfg.epsilon_affinity = 0.0; // auto
    for (int rep = 0; rep < 25; ++rep) {
        auto g1 = oracles::random_snapshot(rng, 12, 0.35);
        auto g2 = oracles::random_snapshot(rng, 12, 0.35);
        double d12 = deltacon_score(g1, g2, cfg);
        double d21 = deltacon_score(g2, g1, cfg);
        CHECK(std::fabs(d12 - d21) <= 1e-10);
        CHECK(deltacon_score(g1, g1, cfg) == 0.0);
        CHECK(d12 >= 0.0);

        // relabel both snapshots by the same permutation p(x) = 11 - x
        auto relabel = [](Snapshot s) {
            for (auto& e : s.edges) {
                e.u = 11 - e.u;
                e.v = 11 - e.v;
                if (e.u > e.v) std::swap(e.u, e.v);
            }
            return s;
        };
        double d_rel = deltacon_score(relabel(g1), relabel(g2), cfg);
        CHECK(d_rel == doctest::Approx(d12).epsilon(1e-9));
    }
}

TEST_CASE("deltacon: affinity rows stay nonnegative and S -> I as eps -> 0") {
    Rng rng(13);
    auto g = oracles::random_snapshot(rng, 10, 0.5);
    for (double eps : {0.05, 0.01}) {
        DenseMatrix s = deltacon_affinity(g, g.nodes, eps);
        for (std::uint32_t i = 0; i < 10; ++i)
            for (std::uint32_t j = 0; j < 10; ++j) CHECK(s.at(i, j) >= -1e-12);
    }
    DenseMatrix tiny = deltacon_affinity(g, g.nodes, 1e-9);
    for (std::uint32_t i = 0; i < 10; ++i)
        for (std::uint32_t j = 0; j < 10; ++j)
            CHECK(tiny.at(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-6));
}

TEST_CASE("deltacon: oversized epsilon is reported as a singular system") {
    Snapshot g = path_graph(6);
    for (auto& e : g.edges) e.w = 50.0;
    DetectorConfig cfg;
    cfg.epsilon_affinity = 0.5;
    CHECK_THROWS_WITH_AS(deltacon_score(g, g, cfg),
                         doctest::Contains("epsilon too large"), std::runtime_error);
}

TEST_CASE("em_window_estimate") {
    PairSet pairs = PairSet::all_pairs({0, 1, 2});
    SUBCASE("binary occurrence frequency") {
        std::vector<Snapshot> window(4);
        for (int i = 0; i < 4; ++i) {
            window[i].t = i + 1;
            window[i].nodes = {0, 1, 2};
        }
        window[0].edges = {{0, 1, 1.0}};
        window[2].edges = {{0, 1, 1.0}};
        auto est = em_window_estimate(window, pairs);
        CHECK(est[pairs.index_of(0, 1)] == 0.5);
        CHECK(est[pairs.index_of(0, 2)] == 0.0); // absent everywhere
    }
    SUBCASE("weighted mean of the per-snapshot normalized weights") {
        std::vector<Snapshot> window(2);
        for (int i = 0; i < 2; ++i) {
            window[i].t = i + 1;
            window[i].nodes = {0, 1, 2};
        }
        // the (0,1) pair holds normalized weight 0.2 then 0.4
        window[0].edges = {{0, 1, 0.2}, {1, 2, 0.5}};
        window[1].edges = {{0, 1, 0.4}, {1, 2, 0.5}};
        auto est = em_window_estimate(window, pairs);
        CHECK(est[pairs.index_of(0, 1)] == doctest::Approx(0.3).epsilon(1e-15));
        CHECK(est[pairs.index_of(1, 2)] == doctest::Approx(0.5).epsilon(1e-15));
    }
    SUBCASE("weights above 1 are rejected as probabilities") {
        std::vector<Snapshot> window(1);
        window[0].t = 1;
        window[0].nodes = {0, 1, 2};
        window[0].edges = {{0, 1, 2.5}};
        CHECK_THROWS(em_window_estimate(window, pairs));
    }
    SUBCASE("binary estimates land on the grid {0, 1/w, ..., 1}") {
        Rng rng(4);
        std::vector<Snapshot> window(4);
        for (int i = 0; i < 4; ++i) {
            auto g = oracles::random_snapshot(rng, 6, 0.5);
            for (auto& e : g.edges) e.w = 1.0;
            g.t = i + 1;
            window[i] = g;
        }
        PairSet ps = PairSet::all_pairs({0, 1, 2, 3, 4, 5});
        for (double p : em_window_estimate(window, ps)) {
            double scaled = p * 4.0;
            CHECK(scaled == doctest::Approx(std::round(scaled)).epsilon(1e-12));
        }
    }
    SUBCASE("empty pair set is an error") {
        PairSet none = PairSet::all_pairs({0});
        std::vector<Snapshot> window(1);
        window[0].nodes = {0};
        CHECK_THROWS(em_window_estimate(window, none));
    }
}

TEST_CASE("kl_divergence") {
    SUBCASE("identical vectors give exactly zero") {
        std::vector<double> p = {0.2, 0.5, 0.9};
        CHECK(kl_divergence(p, p, 1e-6) == 0.0);
    }
    SUBCASE("hand value: single pair 0.5 vs 0.25") {
        double expected = 0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0);
        CHECK(kl_divergence({0.5}, {0.25}, 1e-6) ==
              doctest::Approx(expected).epsilon(1e-12));
        CHECK(expected == doctest::Approx(0.1438).epsilon(1e-3));
    }
    SUBCASE("zeros clamp symmetrically to zero divergence") {
        CHECK(kl_divergence({0.0}, {0.0}, 1e-6) == 0.0);
    }
    SUBCASE("nonnegativity with equality iff clamped equality (1000 cases)") {
        Rng rng(77);
        for (int rep = 0; rep < 1000; ++rep) {
            std::size_t n = 1 + rng.next_below(8);
            std::vector<double> p(n), q(n);
            for (std::size_t i = 0; i < n; ++i) {
                p[i] = rng.next_double();
                q[i] = rng.bernoulli(0.3) ? p[i] : rng.next_double();
            }
            double d = kl_divergence(p, q, 1e-6);
            CHECK(d >= 0.0);
            bool clamped_equal = true;
            for (std::size_t i = 0; i < n; ++i) {
                double cp = std::clamp(p[i], 1e-6, 1.0 - 1e-6);
                double cq = std::clamp(q[i], 1e-6, 1.0 - 1e-6);
                if (cp != cq) clamped_equal = false;
            }
            CHECK((d == 0.0) == clamped_equal);
        }
    }
    SUBCASE("length mismatch is an error") {
        CHECK_THROWS(kl_divergence({0.5}, {0.5, 0.5}, 1e-6));
    }
}

TEST_CASE("em_score: identical windows score zero") {
    Rng rng(8);
    std::vector<Snapshot> w1;
    for (int i = 0; i < 4; ++i) {
        auto g = oracles::random_snapshot(rng, 8, 0.4);
        g.t = i + 1;
        w1.push_back(g);
    }
    PairSet pairs = PairSet::all_pairs(w1[0].nodes);
    DetectorConfig cfg;
    cfg.kind = DetectorKind::EdgeMonitoring;
    cfg.window = 4;
    CHECK(em_score(w1, w1, pairs, cfg) == 0.0);
}

TEST_CASE("em_score: stationary series stays within the false-positive budget") {
    // stationary binary sequence, window 4, density 0.3
    Rng rng(123);
    std::vector<Snapshot> seq;
    const int T = 40;
    for (int t = 1; t <= T; ++t) {
        Snapshot g;
        g.t = t;
        g.nodes.resize(12);
        for (NodeId i = 0; i < 12; ++i) g.nodes[i] = i;
        for (NodeId u = 0; u < 12; ++u)
            for (NodeId v = u + 1; v < 12; ++v)
                if (rng.bernoulli(0.3)) g.edges.push_back({u, v, 1.0});
        seq.push_back(g);
    }
    DetectorConfig cfg;
    cfg.kind = DetectorKind::EdgeMonitoring;
    cfg.window = 4;
    auto scores = score_sequence(seq, cfg);
    REQUIRE(static_cast<int>(scores.size()) == T - 2 * 4 + 1);
    std::vector<double> values;
    for (const auto& [t, s] : scores) values.push_back(s);
    double threshold = bootstrap_threshold(values, 0.95, 1000, 5);
    int flagged = 0;
    for (double v : values)
        if (v > threshold) ++flagged;
    CHECK(flagged <= static_cast<int>(std::ceil(0.05 * (T - 1))) + 1);
}

TEST_CASE("em_score: the straddling window pair dominates a density change") {
    // edge rate 0.3 -> 0.2 at t = 21, 50 tracked pairs, window 4
    Rng rng(1);
    std::vector<NodeId> nodes(11);
    for (NodeId i = 0; i < 11; ++i) nodes[i] = i;
    const int T = 40, change_at = 21;
    std::vector<Snapshot> seq;
    for (int t = 1; t <= T; ++t) {
        Snapshot g;
        g.t = t;
        g.nodes = nodes;
        double rate = t < change_at ? 0.3 : 0.2;
        for (NodeId u = 0; u < 11; ++u)
            for (NodeId v = u + 1; v < 11; ++v) {
                double w = rng.binomial(10, rate) / 10.0;
                if (w > 0.0) g.edges.push_back({u, v, w});
            }
        seq.push_back(g);
    }
    DetectorConfig cfg;
    cfg.kind = DetectorKind::EdgeMonitoring;
    cfg.window = 4;
    cfg.pair_budget = 50;
    cfg.pair_seed = 1;
    auto scores = score_sequence(seq, cfg);
    // straddling scores are those whose window pair spans the boundary
    double best_straddling = 0.0, best_clean = 0.0;
    for (const auto& [t, s] : scores) {
        bool straddles = t > change_at - 4 && t < change_at + 4;
        if (straddles)
            best_straddling = std::max(best_straddling, s);
        else
            best_clean = std::max(best_clean, s);
    }
    CHECK(best_straddling > best_clean);
    // the exact boundary score is the peak
    CHECK(scores.at(change_at) == best_straddling);
}

TEST_CASE("streaming scorer matches the direct window computation") {
    Rng rng(66);
    std::vector<Snapshot> seq;
    const int T = 12;
    for (int t = 1; t <= T; ++t) {
        auto g = oracles::random_snapshot(rng, 9, 0.45);
        g.t = t;
        seq.push_back(g);
    }
    DetectorConfig cfg;
    cfg.kind = DetectorKind::EdgeMonitoring;
    cfg.window = 3;
    auto streamed = score_sequence(seq, cfg);
    PairSet pairs = PairSet::all_pairs(seq[0].nodes);
    for (int t = cfg.window + 1; t <= T - cfg.window + 1; ++t) {
        std::vector<Snapshot> prev(seq.begin() + (t - cfg.window - 1),
                                   seq.begin() + (t - 1));
        std::vector<Snapshot> curr(seq.begin() + (t - 1),
                                   seq.begin() + (t - 1 + cfg.window));
        double direct = em_score(prev, curr, pairs, cfg);
        CHECK(streamed.at(t) == doctest::Approx(direct).epsilon(1e-9));
    }
    // score domain is exactly window+1 .. T-window+1
    CHECK(streamed.begin()->first == cfg.window + 1);
    CHECK(streamed.rbegin()->first == T - cfg.window + 1);
}

TEST_CASE("pair sampling is deterministic and an honest subset") {
    std::vector<NodeId> nodes(30);
    for (NodeId i = 0; i < 30; ++i) nodes[i] = i;
    PairSet a = PairSet::sampled(nodes, 50, 9);
    PairSet b = PairSet::sampled(nodes, 50, 9);
    REQUIRE(a.size() == 50);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.pair_at(i) == b.pair_at(i));
        auto [u, v] = a.pair_at(i);
        CHECK(u < v);
        CHECK(a.index_of(u, v) == i);
    }
    PairSet c = PairSet::sampled(nodes, 50, 10);
    bool any_difference = false;
    for (std::size_t i = 0; i < c.size(); ++i)
        if (c.pair_at(i) != a.pair_at(i)) any_difference = true;
    CHECK(any_difference);
}

TEST_CASE("deltacon scorer reuses affinities across consecutive pairs") {
    Rng rng(91);
    std::vector<Snapshot> seq;
    for (int t = 1; t <= 5; ++t) {
        auto g = oracles::random_snapshot(rng, 8, 0.4);
        g.t = t;
        seq.push_back(g);
    }
    DetectorConfig cfg;
    cfg.kind = DetectorKind::DeltaCon;
    cfg.epsilon_affinity = 0.05;
    auto scores = score_sequence(seq, cfg);
    REQUIRE(scores.size() == 4);
    for (int t = 2; t <= 5; ++t)
        CHECK(scores.at(t) ==
              doctest::Approx(deltacon_score(seq[t - 2], seq[t - 1], cfg)).epsilon(1e-12));
}
