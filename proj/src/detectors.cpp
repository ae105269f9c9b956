#include "hcpd/detectors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hcpd/rng.hpp"

namespace hcpd {

double auto_epsilon(double max_weighted_degree) {
    return 1.0 / (1.0 + std::max(0.0, max_weighted_degree));
}

DenseMatrix deltacon_affinity(const Snapshot& g, const std::vector<NodeId>& nodes,
                              double epsilon, int threads) {
    if (epsilon <= 0.0) throw std::invalid_argument("deltacon: epsilon must be positive");
    const std::uint32_t n = static_cast<std::uint32_t>(nodes.size());
    detail::NodeIndex index(nodes);
    DenseMatrix m(n, n, 0.0);
    std::vector<double> degree(n, 0.0);
    for (const auto& e : g.edges) {
        auto pu = index.position(e.u);
        auto pv = index.position(e.v);
        m.at(pu, pv) -= epsilon * e.w;
        m.at(pv, pu) -= epsilon * e.w;
        degree[pu] += e.w;
        degree[pv] += e.w;
    }
    const double eps2 = epsilon * epsilon;
    for (std::uint32_t i = 0; i < n; ++i) m.at(i, i) = 1.0 + eps2 * degree[i];
    try {
        return spd_inverse(m, threads);
    } catch (const std::runtime_error&) {
        throw std::runtime_error(
            "deltacon: affinity system not positive definite (epsilon too large)");
    }
}

double matusita_distance(const DenseMatrix& s1, const DenseMatrix& s2) {
    if (s1.rows() != s2.rows() || s1.cols() != s2.cols())
        throw std::invalid_argument("matusita: shape mismatch");
    double sum = 0.0;
    const std::uint32_t n = s1.rows();
    for (std::uint32_t i = 0; i < n; ++i) {
        const double* r1 = s1.row(i);
        const double* r2 = s2.row(i);
        for (std::uint32_t j = 0; j < s1.cols(); ++j) {
            double a = r1[j];
            double b = r2[j];
            if (a < 0.0 || b < 0.0) {
                if (a < -1e-12 || b < -1e-12)
                    throw std::runtime_error("matusita: negative affinity beyond tolerance");
                a = std::max(a, 0.0);
                b = std::max(b, 0.0);
            }
            const double d = std::sqrt(a) - std::sqrt(b);
            sum += d * d;
        }
    }
    return std::sqrt(sum);
}

namespace {

std::vector<NodeId> union_nodes(const Snapshot& g1, const Snapshot& g2) {
    std::vector<NodeId> nodes = g1.nodes;
    nodes.insert(nodes.end(), g2.nodes.begin(), g2.nodes.end());
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    return nodes;
}

double max_degree_of(const Snapshot& g) {
    double best = 0.0;
    for (double d : weighted_degrees(g)) best = std::max(best, d);
    return best;
}

} // namespace

double deltacon_score(const Snapshot& g1, const Snapshot& g2, const DetectorConfig& cfg,
                      int threads) {
    auto nodes = union_nodes(g1, g2);
    double eps = cfg.epsilon_affinity;
    if (eps <= 0.0) eps = auto_epsilon(std::max(max_degree_of(g1), max_degree_of(g2)));
    DenseMatrix s1 = deltacon_affinity(g1, nodes, eps, threads);
    DenseMatrix s2 = deltacon_affinity(g2, nodes, eps, threads);
    return matusita_distance(s1, s2);
}

// ---- PairSet ---------------------------------------------------------------

void PairSet::build_position_table() {
    dense_ok_ = false;
    dense_pos_.clear();
    if (nodes_.empty()) return;
    NodeId max_id = nodes_.back();
    if (static_cast<std::uint64_t>(max_id) < 4ULL * nodes_.size() + 64) {
        dense_pos_.assign(max_id + 1, UINT32_MAX);
        for (std::uint32_t i = 0; i < nodes_.size(); ++i) dense_pos_[nodes_[i]] = i;
        dense_ok_ = true;
    }
}

std::uint32_t PairSet::position_of(NodeId id) const {
    if (dense_ok_) {
        if (id < dense_pos_.size()) return dense_pos_[id];
        return UINT32_MAX;
    }
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), id);
    if (it != nodes_.end() && *it == id)
        return static_cast<std::uint32_t>(it - nodes_.begin());
    return UINT32_MAX;
}

PairSet PairSet::all_pairs(std::vector<NodeId> nodes) {
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    PairSet ps;
    ps.nodes_ = std::move(nodes);
    const std::size_t n = ps.nodes_.size();
    ps.count_ = n * (n - 1) / 2;
    ps.all_ = true;
    ps.build_position_table();
    return ps;
}

PairSet PairSet::sampled(std::vector<NodeId> nodes, std::uint64_t budget,
                         std::uint64_t seed) {
    PairSet full = all_pairs(std::move(nodes));
    if (budget == 0 || budget >= full.count_) return full;
    // sample distinct pair indices without replacement (Floyd's algorithm)
    Rng rng(derive_seed(seed, "pair-sample"));
    std::set<std::uint64_t> chosen;
    const std::uint64_t total = full.count_;
    for (std::uint64_t j = total - budget; j < total; ++j) {
        std::uint64_t r = rng.next_below(j + 1);
        if (!chosen.insert(r).second) chosen.insert(j);
    }
    PairSet ps;
    ps.nodes_ = full.nodes_;
    ps.all_ = false;
    ps.build_position_table();
    for (std::uint64_t idx : chosen) {
        auto [u, v] = full.pair_at(idx);
        std::uint64_t key = (static_cast<std::uint64_t>(ps.position_of(u)) << 32) |
                            ps.position_of(v);
        ps.sampled_keys_.push_back(key);
    }
    std::sort(ps.sampled_keys_.begin(), ps.sampled_keys_.end());
    ps.count_ = ps.sampled_keys_.size();
    return ps;
}

std::size_t PairSet::tri_index(std::uint32_t pu, std::uint32_t pv) const {
    const std::size_t n = nodes_.size();
    // pu < pv; row-major upper triangle
    return static_cast<std::size_t>(pu) * (2 * n - pu - 1) / 2 + (pv - pu - 1);
}

std::size_t PairSet::index_of(NodeId u, NodeId v) const {
    if (u == v) return npos;
    std::uint32_t pu = position_of(u);
    std::uint32_t pv = position_of(v);
    if (pu == UINT32_MAX || pv == UINT32_MAX) return npos;
    if (pu > pv) std::swap(pu, pv);
    if (all_) return tri_index(pu, pv);
    std::uint64_t key = (static_cast<std::uint64_t>(pu) << 32) | pv;
    auto it = std::lower_bound(sampled_keys_.begin(), sampled_keys_.end(), key);
    if (it != sampled_keys_.end() && *it == key)
        return static_cast<std::size_t>(it - sampled_keys_.begin());
    return npos;
}

std::pair<NodeId, NodeId> PairSet::pair_at(std::size_t i) const {
    if (i >= count_) throw std::out_of_range("pair_at");
    if (!all_) {
        std::uint64_t key = sampled_keys_[i];
        return {nodes_[key >> 32], nodes_[key & 0xffffffffULL]};
    }
    const std::size_t n = nodes_.size();
    std::size_t pu = 0;
    std::size_t remaining = i;
    while (remaining >= n - pu - 1) {
        remaining -= n - pu - 1;
        ++pu;
    }
    return {nodes_[pu], nodes_[pu + 1 + remaining]};
}

// ---- EdgeMonitoring --------------------------------------------------------

namespace {

// One snapshot's per-pair probability contribution. Weights act as edge
// probabilities directly, so they must already live in [0,1] (binary
// snapshots and the binomial-normalized generators do; rescale ingested
// volumes before monitoring them).
std::vector<std::pair<std::size_t, double>> snapshot_contribution(const Snapshot& g,
                                                                  const PairSet& pairs) {
    std::vector<std::pair<std::size_t, double>> out;
    out.reserve(g.edges.size());
    for (const auto& e : g.edges) {
        if (e.w > 1.0)
            throw std::invalid_argument(
                "edge-monitoring: weight above 1 cannot act as a probability; "
                "rescale the snapshot weights first");
        std::size_t idx = pairs.index_of(e.u, e.v);
        if (idx == PairSet::npos) continue;
        out.push_back({idx, e.w});
    }
    return out;
}

} // namespace

std::vector<double> em_window_estimate(const std::vector<const Snapshot*>& window,
                                       const PairSet& pairs) {
    if (pairs.size() == 0) throw std::invalid_argument("em: empty pair set");
    if (window.empty()) throw std::invalid_argument("em: empty window");
    std::vector<double> est(pairs.size(), 0.0);
    for (const Snapshot* g : window)
        for (const auto& [idx, w] : snapshot_contribution(*g, pairs)) est[idx] += w;
    const double inv = 1.0 / static_cast<double>(window.size());
    for (double& p : est) p *= inv;
    return est;
}

std::vector<double> em_window_estimate(const std::vector<Snapshot>& window,
                                       const PairSet& pairs) {
    std::vector<const Snapshot*> ptrs;
    ptrs.reserve(window.size());
    for (const auto& g : window) ptrs.push_back(&g);
    return em_window_estimate(ptrs, pairs);
}

double kl_divergence(const std::vector<double>& p, const std::vector<double>& q,
                     double smoothing) {
    if (p.size() != q.size()) throw std::invalid_argument("kl: length mismatch");
    if (smoothing <= 0.0 || smoothing >= 0.5)
        throw std::invalid_argument("kl: smoothing must lie in (0, 0.5)");
    const double lo = smoothing;
    const double hi = 1.0 - smoothing;
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double pi = std::clamp(p[i], lo, hi);
        const double qi = std::clamp(q[i], lo, hi);
        if (pi == qi) continue;
        sum += pi * std::log(pi / qi) + (1.0 - pi) * std::log((1.0 - pi) / (1.0 - qi));
    }
    return sum;
}

double em_score(const std::vector<Snapshot>& prev_window,
                const std::vector<Snapshot>& curr_window, const PairSet& pairs,
                const DetectorConfig& cfg) {
    if (static_cast<int>(prev_window.size()) != cfg.window ||
        static_cast<int>(curr_window.size()) != cfg.window)
        throw std::invalid_argument("em_score: window length mismatch");
    return kl_divergence(em_window_estimate(prev_window, pairs),
                         em_window_estimate(curr_window, pairs), cfg.smoothing);
}

// ---- Streaming scorers -----------------------------------------------------

DeltaConScorer::DeltaConScorer(std::vector<NodeId> nodes, double epsilon, int threads)
    : nodes_(std::move(nodes)), epsilon_(epsilon), threads_(threads) {}

void DeltaConScorer::push(const Snapshot& g) {
    DenseMatrix affinity = deltacon_affinity(g, nodes_, epsilon_, threads_);
    if (have_prev_) scores_[g.t] = matusita_distance(prev_affinity_, affinity);
    prev_affinity_ = std::move(affinity);
    have_prev_ = true;
}

EdgeMonitoringScorer::EdgeMonitoringScorer(PairSet pairs, int window, double smoothing)
    : pairs_(std::move(pairs)), window_(window), smoothing_(smoothing) {
    if (window_ < 1) throw std::invalid_argument("em: window must be >= 1");
    if (pairs_.size() == 0) throw std::invalid_argument("em: empty pair set");
    prev_sum_.assign(pairs_.size(), 0.0);
    curr_sum_.assign(pairs_.size(), 0.0);
}

void EdgeMonitoringScorer::push(const Snapshot& g) {
    auto contribution = snapshot_contribution(g, pairs_);
    for (const auto& [idx, w] : contribution) curr_sum_[idx] += w;
    recent_.push_back(std::move(contribution));
    ++curr_count_;
    last_t_ = g.t;
    if (curr_count_ > window_) {
        // slide the oldest current-window snapshot into the previous window
        auto& oldest_curr = recent_[recent_.size() - 1 - window_];
        for (const auto& [idx, w] : oldest_curr) {
            curr_sum_[idx] -= w;
            prev_sum_[idx] += w;
        }
        --curr_count_;
        ++prev_count_;
    }
    if (prev_count_ > window_) {
        for (const auto& [idx, w] : recent_.front()) prev_sum_[idx] -= w;
        recent_.pop_front();
        --prev_count_;
    }
    if (prev_count_ == window_ && curr_count_ == window_) {
        const double inv = 1.0 / static_cast<double>(window_);
        std::vector<double> p(pairs_.size()), q(pairs_.size());
        for (std::size_t i = 0; i < pairs_.size(); ++i) {
            p[i] = prev_sum_[i] * inv;
            q[i] = curr_sum_[i] * inv;
        }
        // score belongs to the first time index of the current window
        scores_[last_t_ - window_ + 1] = kl_divergence(p, q, smoothing_);
    }
}

std::unique_ptr<ScopeScorer> make_scorer(const DetectorConfig& cfg,
                                         std::vector<NodeId> scope_nodes, double epsilon,
                                         int threads) {
    if (cfg.kind == DetectorKind::DeltaCon)
        return std::make_unique<DeltaConScorer>(std::move(scope_nodes), epsilon, threads);
    PairSet pairs = cfg.pair_budget == 0
                        ? PairSet::all_pairs(std::move(scope_nodes))
                        : PairSet::sampled(std::move(scope_nodes), cfg.pair_budget,
                                           cfg.pair_seed);
    return std::make_unique<EdgeMonitoringScorer>(std::move(pairs), cfg.window,
                                                  cfg.smoothing);
}

std::map<int, double> score_sequence(const std::vector<Snapshot>& snapshots,
                                     const DetectorConfig& cfg, int threads) {
    if (snapshots.empty()) return {};
    std::vector<NodeId> nodes;
    for (const auto& g : snapshots) {
        nodes.insert(nodes.end(), g.nodes.begin(), g.nodes.end());
    }
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    double eps = cfg.epsilon_affinity;
    if (cfg.kind == DetectorKind::DeltaCon && eps <= 0.0) {
        double maxdeg = 0.0;
        for (const auto& g : snapshots) maxdeg = std::max(maxdeg, max_degree_of(g));
        eps = auto_epsilon(maxdeg);
    }
    auto scorer = make_scorer(cfg, std::move(nodes), eps, threads);
    for (const auto& g : snapshots) scorer->push(g);
    return scorer->take_scores();
}

} // namespace hcpd
