#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hcpd/community.hpp"
#include "hcpd/detectors.hpp"
#include "hcpd/graph.hpp"
#include "hcpd/io.hpp"

namespace hcpd {

struct RunOptions {
    double level = 0.95;
    int bootstrap_samples = 1000;
    std::uint64_t seed = 0;
    int threads = 1;
    bool include_contracted = true;
    bool include_communities = true;
    bool include_original = false; // extra comparison scope on the uncontracted graphs
    bool repartition_on_global = false;
    std::optional<CommunityAssignment> assignment; // default: Louvain on G_1
};

struct RepartitionRecord {
    int t = 0;
    CommunityAssignment assignment;
    double modularity = 0.0;
};

// Everything one hierarchical run produces: the partition used, one score
// series per scope with its threshold and change set, wall time per scope.
struct ChangeReport {
    DetectorConfig config;
    RunOptions options;
    CommunityAssignment partition;
    std::string partition_source; // "louvain" or "provided"
    std::optional<ScoreSeries> contracted;           // global change points
    std::map<CommunityId, ScoreSeries> communities;  // local change points
    std::optional<ScoreSeries> original;             // optional comparison scope
    std::map<std::string, double> epsilon_used;      // deltacon, per scope
    std::map<std::string, double> wall_seconds;      // per scope
    std::vector<RepartitionRecord> repartitions;

    const ScoreSeries* find_scope(const std::string& name) const;
};

// Partition once, contract every snapshot, score every community subgraph
// pair and the contracted pair, then bootstrap a threshold per scope.
ChangeReport run_hierarchical(const SequenceSource& seq, const DetectorConfig& cfg,
                              const RunOptions& opts);

// For every flagged global change point t*, recompute the partition on the
// snapshot at t*. Returns the repartition points in time order.
std::vector<RepartitionRecord> repartition_on_global_change(const SequenceSource& seq,
                                                            const ChangeReport& report);

// Report document; `include_timings` off gives the byte-stable portion.
std::string report_to_json(const ChangeReport& report, bool include_timings = true);
ChangeReport report_scores_from_json(const std::string& json_text); // scores/thresholds only

// Plot-ready rows: "scope,t,score,threshold,is_change".
std::string report_to_csv(const ChangeReport& report);

std::string scope_name(const ScoreSeries& s);

} // namespace hcpd
