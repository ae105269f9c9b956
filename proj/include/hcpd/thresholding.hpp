#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <vector>

namespace hcpd {

// Linear-interpolation percentile of the values (need not be sorted).
double percentile_linear(std::vector<double> values, double level);

// Bootstrap threshold: B resamples with replacement (each of the original
// length), the level-percentile of each, aggregated by mean. Deterministic
// per seed; resample b draws from a seed derived as (seed, b) so resamples
// could be computed in parallel without changing the result.
double bootstrap_threshold(const std::vector<double>& scores, double level, int B,
                           std::uint64_t seed);

// Strict exceedances {t : scores[t] > threshold}; ties are non-changes.
std::set<int> extract_changes(const std::map<int, double>& scores, double threshold);

} // namespace hcpd
