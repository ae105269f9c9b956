#include "hcpd/thresholding.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hcpd/rng.hpp"

namespace hcpd {

double percentile_linear(std::vector<double> values, double level) {
    if (values.empty()) throw std::invalid_argument("percentile: empty input");
    if (!(level > 0.0 && level < 1.0))
        throw std::invalid_argument("percentile: level must lie in (0,1)");
    std::sort(values.begin(), values.end());
    const double rank = level * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(rank);
    const double frac = rank - static_cast<double>(lo);
    if (lo + 1 >= values.size()) return values.back();
    return values[lo] + frac * (values[lo + 1] - values[lo]);
}

double bootstrap_threshold(const std::vector<double>& scores, double level, int B,
                           std::uint64_t seed) {
    if (scores.size() < 2)
        throw std::invalid_argument("bootstrap_threshold: need at least 2 scores");
    if (B < 1) throw std::invalid_argument("bootstrap_threshold: B must be >= 1");
    for (double s : scores)
        if (!std::isfinite(s))
            throw std::invalid_argument("bootstrap_threshold: non-finite score");
    if (!(level > 0.0 && level < 1.0))
        throw std::invalid_argument("bootstrap_threshold: level must lie in (0,1)");

    const std::size_t m = scores.size();
    std::vector<double> resample(m);
    std::vector<double> percentiles;
    percentiles.reserve(B);
    for (int b = 0; b < B; ++b) {
        Rng rng(derive_seed(seed, "bootstrap", static_cast<std::uint64_t>(b)));
        for (std::size_t i = 0; i < m; ++i) resample[i] = scores[rng.next_below(m)];
        percentiles.push_back(percentile_linear(resample, level));
    }
    // a constant series must yield the constant exactly, so skip the division
    const auto [mn, mx] = std::minmax_element(percentiles.begin(), percentiles.end());
    if (*mn == *mx) return *mn;
    double sum = 0.0;
    for (double p : percentiles) sum += p;
    return sum / static_cast<double>(B);
}

std::set<int> extract_changes(const std::map<int, double>& scores, double threshold) {
    std::set<int> changes;
    for (const auto& [t, s] : scores)
        if (s > threshold) changes.insert(t);
    return changes;
}

} // namespace hcpd
