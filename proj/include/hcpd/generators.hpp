#pragma once

#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "hcpd/graph.hpp"

namespace hcpd {

enum class EventScope { Global, Local };
enum class EventKind { RateScaleIntra, RateScaleInter, MatrixRegenerate, ClRegenerate };

struct ChangeEvent {
    int t = 0;
    EventScope scope = EventScope::Local;
    EventKind kind = EventKind::RateScaleIntra;
    std::vector<CommunityId> communities; // 1-based ranks; empty = all (ClRegenerate)
    double factor = 1.0;
};

// Ground-truth injected changes, times strictly increasing.
using EventSchedule = std::vector<ChangeEvent>;

struct GroundTruth {
    EventSchedule schedule;
    CommunityAssignment assignment; // planted communities, ids 1..k by size desc
};

struct SbmConfig {
    std::vector<std::uint32_t> community_sizes; // sorted descending
    // symmetric k x k block probabilities; empty = sample Uniform(0,1) entries
    // conditioned on min(diagonal) > max(off-diagonal) at generation time
    std::vector<std::vector<double>> block_matrix;
    int trials = 10; // binomial weight parameter; weight = successes/trials
};

struct BterConfig {
    std::uint32_t n = 100;
    std::uint32_t k = 5;
    std::vector<std::uint32_t> community_sizes; // empty = power-law rejection sample
    std::vector<double> er_probs;               // empty = Beta(2,5)/2 per community
    std::vector<double> cl_weights;             // empty = Pareto(1, 2.0) per node
    int trials = 10;
    // bounds for the size sampler
    std::uint32_t size_min = 15;
    std::uint32_t size_max = 25;
    double size_exponent = 2.5;
    double cl_exponent = 2.0;
};

// Deterministic snapshot source; snapshot(t) is a pure function of
// (config, schedule, seed, t), so sequences can be streamed without
// materializing every snapshot.
class GeneratedSequence {
public:
    virtual ~GeneratedSequence() = default;
    virtual Snapshot snapshot(int t) const = 0;
    int length() const { return length_; }
    const GroundTruth& truth() const { return truth_; }
    const std::vector<NodeId>& universe() const { return universe_; }
    DynamicNetwork materialize() const;

protected:
    int length_ = 0;
    GroundTruth truth_;
    std::vector<NodeId> universe_;
};

class SbmSequence final : public GeneratedSequence {
public:
    SbmSequence(SbmConfig cfg, int T, EventSchedule schedule, std::uint64_t seed);
    Snapshot snapshot(int t) const override;
    // block matrix in force at time t (for inspection and tests)
    const std::vector<std::vector<double>>& block_matrix_at(int t) const;

private:
    SbmConfig cfg_;
    std::uint64_t seed_;
    std::vector<CommunityId> block_of_; // node -> community rank
    std::vector<std::pair<int, std::vector<std::vector<double>>>> epochs_;
};

class BterSequence final : public GeneratedSequence {
public:
    BterSequence(BterConfig cfg, int T, EventSchedule schedule, std::uint64_t seed);
    Snapshot snapshot(int t) const override;
    double pair_probability_at(int t, NodeId u, NodeId v) const;

private:
    struct Epoch {
        int from_t;
        std::vector<double> er_probs;
        std::vector<double> cl_weights;
        double cl_sum;
    };
    BterConfig cfg_;
    std::uint64_t seed_;
    std::vector<CommunityId> block_of_;
    std::vector<Epoch> epochs_;
    const Epoch& epoch_at(int t) const;
};

// Materializing wrappers matching the operation contracts; prefer the
// sequence classes for large runs.
std::pair<DynamicNetwork, GroundTruth> sbm_generate(const SbmConfig& cfg, int T,
                                                    const EventSchedule& schedule,
                                                    std::uint64_t seed);
std::pair<DynamicNetwork, GroundTruth> bter_generate(const BterConfig& cfg, int T,
                                                     const EventSchedule& schedule,
                                                     std::uint64_t seed);

// The four-event schedules used by the synthetic experiments:
//   t=16 intra rate of the largest community x 2/3        (local)
//   t=31 SBM: inter rates among ranks {1,2,6,7} x 2/3      (global)
//        BTER: Chung-Lu weights of the largest community redrawn (global)
//   t=51 intra rates of the two smallest communities x 2   (local)
//   t=76 SBM: block matrix regenerated                     (global)
//        BTER: Chung-Lu weights of every node redrawn      (global)
std::pair<EventSchedule, EventSchedule> table1_schedules();

// Experiment presets: 1000 nodes in 8 communities (300..50) for the SBM,
// 100 nodes in 5 communities (23,22,20,18,17) for BTER.
SbmConfig sbm_table1_config();
BterConfig bter_table1_config();
constexpr int kTable1Length = 100;

// Uniform(0,1) symmetric block matrix conditioned on every diagonal entry
// exceeding every off-diagonal entry.
std::vector<std::vector<double>> sample_dominant_block_matrix(std::uint32_t k,
                                                              std::uint64_t seed);

} // namespace hcpd
