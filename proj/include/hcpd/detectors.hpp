#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "hcpd/graph.hpp"
#include "hcpd/linalg.hpp"

namespace hcpd {

enum class DetectorKind { DeltaCon, EdgeMonitoring };

struct DetectorConfig {
    DetectorKind kind = DetectorKind::DeltaCon;
    int window = 4;                // edge-monitoring: snapshots pooled per window
    double epsilon_affinity = 0.05; // deltacon; 0 picks 1/(1 + max weighted degree)
    double smoothing = 1e-6;       // edge-monitoring probability clamp
    std::uint64_t pair_budget = 0; // 0 tracks every pair in the scope
    std::uint64_t pair_seed = 0;   // seeds pair sampling when budgeted
};

// Outlier scores for one scope: t -> score where both arguments existed,
// plus the bootstrap threshold and the flagged exceedances.
struct ScoreSeries {
    std::string scope;
    std::map<int, double> scores;
    double threshold = 0.0;
    std::set<int> changes; // {t : scores[t] > threshold}
};

// ---- DeltaCon -------------------------------------------------------------

// Node-affinity matrix: solve (I + eps^2 * Degree - eps * Adjacency) S = I
// over the given node list (nodes absent from g are isolated).
DenseMatrix deltacon_affinity(const Snapshot& g, const std::vector<NodeId>& nodes,
                              double epsilon, int threads = 1);

// Rooted Euclidean (Matusita) distance between the two affinity matrices;
// higher = more changed. Node set is the union of the two snapshots' nodes.
double deltacon_score(const Snapshot& g1, const Snapshot& g2, const DetectorConfig& cfg,
                      int threads = 1);

double matusita_distance(const DenseMatrix& s1, const DenseMatrix& s2);

// eps = 1/(1 + max weighted degree), the largest value that keeps the
// affinity system strictly diagonally dominant for these snapshots.
double auto_epsilon(double max_weighted_degree);

// ---- EdgeMonitoring -------------------------------------------------------

// Fixed set of monitored node pairs for one scope.
class PairSet {
public:
    static PairSet all_pairs(std::vector<NodeId> nodes);
    static PairSet sampled(std::vector<NodeId> nodes, std::uint64_t budget,
                           std::uint64_t seed);

    std::size_t size() const { return count_; }
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
    std::size_t index_of(NodeId u, NodeId v) const;
    std::pair<NodeId, NodeId> pair_at(std::size_t i) const;
    const std::vector<NodeId>& nodes() const { return nodes_; }

private:
    std::vector<NodeId> nodes_; // sorted
    std::size_t count_ = 0;
    bool all_ = true;
    std::vector<std::uint64_t> sampled_keys_; // sorted (pos_u << 32 | pos_v)
    std::vector<std::uint32_t> dense_pos_;    // id -> position when ids are compact
    bool dense_ok_ = false;
    void build_position_table();
    std::uint32_t position_of(NodeId id) const; // UINT32_MAX when unknown
    std::size_t tri_index(std::uint32_t pu, std::uint32_t pv) const;
};

// Per-pair edge-probability estimate from a window of snapshots: the mean of
// the per-snapshot weights, which must already be normalized into [0,1]
// (binary windows therefore degenerate to occurrence/window). Throws when a
// weight exceeds 1.
std::vector<double> em_window_estimate(const std::vector<const Snapshot*>& window,
                                       const PairSet& pairs);
std::vector<double> em_window_estimate(const std::vector<Snapshot>& window,
                                       const PairSet& pairs);

// Sum over pairs of the Bernoulli KL divergence D((p_i,1-p_i) || (q_i,1-q_i))
// in nats, after clamping entries into [smoothing, 1-smoothing]. Zero iff the
// clamped vectors are equal.
double kl_divergence(const std::vector<double>& p, const std::vector<double>& q,
                     double smoothing);

// KL of the estimates of two consecutive windows; the score belongs to the
// first time index of the current window.
double em_score(const std::vector<Snapshot>& prev_window,
                const std::vector<Snapshot>& curr_window, const PairSet& pairs,
                const DetectorConfig& cfg);

// ---- Streaming interface ---------------------------------------------------

// Consumes a scope's snapshots t = 1..T one at a time and yields the
// per-t outlier scores at the end. One instance per scope per run.
class ScopeScorer {
public:
    virtual ~ScopeScorer() = default;
    virtual void push(const Snapshot& g) = 0;
    virtual std::map<int, double> take_scores() = 0;
};

class DeltaConScorer final : public ScopeScorer {
public:
    DeltaConScorer(std::vector<NodeId> nodes, double epsilon, int threads);
    void push(const Snapshot& g) override;
    std::map<int, double> take_scores() override { return std::move(scores_); }

private:
    std::vector<NodeId> nodes_;
    double epsilon_;
    int threads_;
    bool have_prev_ = false;
    DenseMatrix prev_affinity_;
    std::map<int, double> scores_;
};

class EdgeMonitoringScorer final : public ScopeScorer {
public:
    EdgeMonitoringScorer(PairSet pairs, int window, double smoothing);
    void push(const Snapshot& g) override;
    std::map<int, double> take_scores() override { return std::move(scores_); }

private:
    PairSet pairs_;
    int window_;
    double smoothing_;
    std::deque<std::vector<std::pair<std::size_t, double>>> recent_; // last <= 2w contributions
    std::vector<double> prev_sum_;
    std::vector<double> curr_sum_;
    int curr_count_ = 0;
    int prev_count_ = 0;
    int last_t_ = 0;
    std::map<int, double> scores_;
};

// Scorer for `cfg` over a scope with the given node list. `epsilon` must be
// the already-resolved affinity epsilon (auto-resolution needs scope-global
// degree information the scorer cannot see).
std::unique_ptr<ScopeScorer> make_scorer(const DetectorConfig& cfg,
                                         std::vector<NodeId> scope_nodes,
                                         double epsilon, int threads);

// Convenience for materialized sequences (tests, small inputs).
std::map<int, double> score_sequence(const std::vector<Snapshot>& snapshots,
                                     const DetectorConfig& cfg, int threads = 1);

} // namespace hcpd
