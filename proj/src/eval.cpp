#include "hcpd/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "hcpd/framework.hpp"
#include "hcpd/rng.hpp"

namespace hcpd {

namespace {

// time indices sorted by descending score, ties by ascending t
std::vector<int> ranking_of(const std::map<int, double>& series) {
    std::vector<std::pair<int, double>> items(series.begin(), series.end());
    std::stable_sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    std::vector<int> order;
    order.reserve(items.size());
    for (const auto& [t, s] : items) order.push_back(t);
    return order;
}

} // namespace

double ndcg(const std::map<int, double>& target, const std::map<int, double>& reference) {
    if (target.empty() || reference.empty())
        throw std::invalid_argument("ndcg: empty series");
    if (target.size() != reference.size())
        throw std::invalid_argument("ndcg: time domains differ");
    for (const auto& [t, s] : target)
        if (!reference.count(t)) throw std::invalid_argument("ndcg: time domains differ");

    const std::vector<int> tgt = ranking_of(target);
    const std::vector<int> ref = ranking_of(reference);
    const std::size_t n = tgt.size();

    // membership counters make every prefix intersection incremental
    std::map<int, int> seen; // t -> +1 if in target prefix, +2 if in reference prefix
    long double dcg = 0.0L;
    long double idcg = 0.0L;
    int matches = 0;
    for (std::size_t i = 0; i < n; ++i) {
        int& tgt_flags = seen[tgt[i]];
        tgt_flags |= 1;
        if (tgt_flags == 3) ++matches;
        int& ref_flags = seen[ref[i]];
        ref_flags |= 2;
        if (ref_flags == 3) ++matches;
        const long double discount = std::log2(static_cast<long double>(i) + 2.0L);
        dcg += (std::exp2(static_cast<long double>(matches)) - 1.0L) / discount;
        idcg += (std::exp2(static_cast<long double>(i) + 1.0L) - 1.0L) / discount;
    }
    return static_cast<double>(dcg / idcg);
}

DetectionMetrics detection_metrics(const std::set<int>& detected,
                                   const std::vector<int>& truth_times, int slack) {
    if (slack < 0) throw std::invalid_argument("detection_metrics: slack must be >= 0");
    std::vector<int> truth = truth_times;
    std::sort(truth.begin(), truth.end());
    std::vector<int> dets(detected.begin(), detected.end());

    // both sorted: greedy earliest-feasible matching is maximum for intervals
    DetectionMetrics m;
    std::size_t di = 0;
    for (int tv : truth) {
        while (di < dets.size() && dets[di] < tv - slack) ++di;
        if (di < dets.size() && std::abs(dets[di] - tv) <= slack) {
            ++m.matched;
            ++di;
        }
    }
    m.precision = dets.empty() ? 1.0
                               : static_cast<double>(m.matched) /
                                     static_cast<double>(dets.size());
    m.recall = truth.empty() ? 1.0
                             : static_cast<double>(m.matched) /
                                   static_cast<double>(truth.size());
    return m;
}

BenchResult bench(const SequenceSource& seq, const DetectorConfig& cfg,
                  const CommunityAssignment& partition,
                  const std::vector<std::string>& scopes, int repetitions,
                  std::uint64_t seed) {
    if (repetitions < 1) throw std::invalid_argument("bench: repetitions must be >= 1");
    using Clock = std::chrono::steady_clock;

    RunOptions opts;
    opts.seed = seed;
    opts.threads = 1; // one thread per timed region keeps timings comparable
    opts.assignment = partition;

    auto run_scope = [&](const std::string& scope) {
        RunOptions o = opts;
        o.include_contracted = scope == "contracted";
        o.include_original = scope == "original";
        o.include_communities = scope == "communities";
        auto start = Clock::now();
        run_hierarchical(seq, cfg, o);
        return std::chrono::duration<double>(Clock::now() - start).count();
    };

    // warm-up outside the timed repetitions
    run_scope("contracted");

    BenchResult result;
    for (const auto& scope : scopes) {
        BenchScope bs;
        bs.scope = scope;
        for (int r = 0; r < repetitions; ++r) bs.runs.push_back(run_scope(scope));
        std::vector<double> sorted = bs.runs;
        std::sort(sorted.begin(), sorted.end());
        bs.median_seconds = sorted[sorted.size() / 2];
        result.scopes.push_back(std::move(bs));
    }
    double original = 0.0, contracted = 0.0;
    for (const auto& bs : result.scopes) {
        if (bs.scope == "original") original = bs.median_seconds;
        if (bs.scope == "contracted") contracted = bs.median_seconds;
    }
    if (original > 0.0 && contracted > 0.0) result.speedup = original / contracted;
    return result;
}

std::string bench_to_csv(const BenchResult& result) {
    std::string csv = "scope,median_seconds,runs\n";
    for (const auto& bs : result.scopes) {
        csv += bs.scope;
        csv += ',';
        csv += format_double(bs.median_seconds);
        csv += ',';
        for (std::size_t i = 0; i < bs.runs.size(); ++i) {
            if (i) csv += ';';
            csv += format_double(bs.runs[i]);
        }
        csv += '\n';
    }
    if (result.speedup > 0.0) csv += "speedup," + format_double(result.speedup) + ",\n";
    return csv;
}

} // namespace hcpd
