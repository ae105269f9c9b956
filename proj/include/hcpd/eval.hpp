#pragma once

#include <map>
#include <set>
#include <vector>

#include "hcpd/detectors.hpp"
#include "hcpd/generators.hpp"
#include "hcpd/io.hpp"

namespace hcpd {

// Ranking agreement between a target and a reference score series over the
// same time domain. Both rankings sort by descending score (ties by ascending
// t); r_i = |prefix_i(target) ∩ prefix_i(reference)| as sets of time indices;
// NDCG = sum (2^r_i - 1)/log2(i+1) over sum (2^i - 1)/log2(i+1), in (0, 1].
double ndcg(const std::map<int, double>& target, const std::map<int, double>& reference);

struct DetectionMetrics {
    double precision = 1.0; // no detections = no false positives
    double recall = 0.0;
    int matched = 0;
};

// One-to-one matching of detections to truth times with |t_det - t_event| <=
// slack; standard precision/recall on top of the matching.
DetectionMetrics detection_metrics(const std::set<int>& detected,
                                   const std::vector<int>& truth_times, int slack);

struct BenchScope {
    std::string scope;
    double median_seconds = 0.0;
    std::vector<double> runs;
};

struct BenchResult {
    std::vector<BenchScope> scopes;
    double speedup = 0.0; // time(original) / time(contracted) when both present
};

// Median-of-repetitions wall time for detection per scope (original vs
// contracted vs per-community), single-threaded inside each timed region.
BenchResult bench(const SequenceSource& seq, const DetectorConfig& cfg,
                  const CommunityAssignment& partition,
                  const std::vector<std::string>& scopes, int repetitions,
                  std::uint64_t seed);

std::string bench_to_csv(const BenchResult& result);

} // namespace hcpd
