#include "hcpd/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "hcpd/rng.hpp"

namespace hcpd {

namespace {

std::vector<CommunityId> blocks_from_sizes(const std::vector<std::uint32_t>& sizes) {
    std::vector<CommunityId> block_of;
    for (std::uint32_t c = 0; c < sizes.size(); ++c)
        block_of.insert(block_of.end(), sizes[c], c + 1);
    return block_of;
}

CommunityAssignment planted_assignment(const std::vector<CommunityId>& block_of) {
    std::vector<NodeId> nodes(block_of.size());
    std::iota(nodes.begin(), nodes.end(), 0u);
    return CommunityAssignment(nodes, block_of);
}

void check_schedule(const EventSchedule& schedule, int T, std::uint32_t k) {
    int prev_t = 0;
    for (const auto& ev : schedule) {
        if (ev.t <= prev_t)
            throw std::invalid_argument("schedule: event times must be strictly increasing");
        prev_t = ev.t;
        if (ev.t > T) throw std::invalid_argument("schedule: event time beyond T");
        if (ev.factor <= 0.0) throw std::invalid_argument("schedule: factor must be > 0");
        for (CommunityId c : ev.communities)
            if (c == 0 || c > k)
                throw std::invalid_argument("schedule: unknown community " + std::to_string(c));
    }
}

double clamp01(double p) { return std::clamp(p, 0.0, 1.0); }

// Weight of one pair at one time: an independent stream per (t, u, v), so
// injections that touch only other pairs leave this draw bit-identical.
double pair_weight(std::uint64_t seed, int t, NodeId u, NodeId v, double p, int trials) {
    if (p <= 0.0) return 0.0;
    std::uint64_t key = (static_cast<std::uint64_t>(u) << 32) | v;
    Rng rng(derive_seed(seed, "weights", static_cast<std::uint64_t>(t), key));
    return static_cast<double>(rng.binomial(trials, p)) / static_cast<double>(trials);
}

} // namespace

DynamicNetwork GeneratedSequence::materialize() const {
    DynamicNetwork net;
    net.node_universe = universe_;
    net.snapshots.reserve(length_);
    for (int t = 1; t <= length_; ++t) net.snapshots.push_back(snapshot(t));
    return net;
}

std::vector<std::vector<double>> sample_dominant_block_matrix(std::uint32_t k,
                                                              std::uint64_t seed) {
    // Equivalent to rejection sampling Uniform(0,1)^(k + k(k-1)/2) until
    // min(diagonal) > max(off-diagonal): by exchangeability, the accepted law
    // is "draw all values, give the top k to the diagonal in random order and
    // the rest to the off-diagonal in random order".
    const std::uint32_t offdiag = k * (k - 1) / 2;
    const std::uint32_t total = k + offdiag;
    Rng rng(seed);
    std::vector<double> values(total);
    for (auto& v : values) v = rng.next_double();
    std::sort(values.begin(), values.end(), std::greater<>());
    auto shuffle_range = [&](std::vector<double>& vec) {
        for (std::size_t i = vec.size(); i > 1; --i)
            std::swap(vec[i - 1], vec[rng.next_below(i)]);
    };
    std::vector<double> diag(values.begin(), values.begin() + k);
    std::vector<double> rest(values.begin() + k, values.end());
    shuffle_range(diag);
    shuffle_range(rest);
    std::vector<std::vector<double>> m(k, std::vector<double>(k, 0.0));
    std::size_t idx = 0;
    for (std::uint32_t i = 0; i < k; ++i) {
        m[i][i] = diag[i];
        for (std::uint32_t j = i + 1; j < k; ++j) {
            m[i][j] = rest[idx];
            m[j][i] = rest[idx];
            ++idx;
        }
    }
    return m;
}

// ---- SBM --------------------------------------------------------------------

SbmSequence::SbmSequence(SbmConfig cfg, int T, EventSchedule schedule, std::uint64_t seed)
    : cfg_(std::move(cfg)), seed_(seed) {
    if (cfg_.community_sizes.empty())
        throw std::invalid_argument("sbm: community sizes required");
    if (!std::is_sorted(cfg_.community_sizes.begin(), cfg_.community_sizes.end(),
                        std::greater<>()))
        throw std::invalid_argument("sbm: community sizes must be sorted descending");
    if (cfg_.trials < 1) throw std::invalid_argument("sbm: trials must be >= 1");
    const std::uint32_t k = static_cast<std::uint32_t>(cfg_.community_sizes.size());
    check_schedule(schedule, T, k);

    std::vector<std::vector<double>> matrix = cfg_.block_matrix;
    if (matrix.empty()) {
        matrix = sample_dominant_block_matrix(k, derive_seed(seed_, "matrix", 0));
    } else {
        if (matrix.size() != k)
            throw std::invalid_argument("sbm: block matrix size mismatch");
        double min_diag = 1.0, max_off = 0.0;
        for (std::uint32_t i = 0; i < k; ++i) {
            if (matrix[i].size() != k)
                throw std::invalid_argument("sbm: block matrix not square");
            for (std::uint32_t j = 0; j < k; ++j) {
                if (matrix[i][j] < 0.0 || matrix[i][j] > 1.0)
                    throw std::invalid_argument("sbm: block probability outside [0,1]");
                if (matrix[i][j] != matrix[j][i])
                    throw std::invalid_argument("sbm: block matrix not symmetric");
                if (i == j)
                    min_diag = std::min(min_diag, matrix[i][j]);
                else
                    max_off = std::max(max_off, matrix[i][j]);
            }
        }
        if (k > 1 && !(min_diag > max_off))
            throw std::invalid_argument("sbm: diagonal must dominate off-diagonal");
    }

    epochs_.push_back({1, matrix});
    for (const auto& ev : schedule) {
        auto next = epochs_.back().second;
        switch (ev.kind) {
        case EventKind::RateScaleIntra:
            for (CommunityId c : ev.communities)
                next[c - 1][c - 1] = clamp01(next[c - 1][c - 1] * ev.factor);
            break;
        case EventKind::RateScaleInter:
            for (CommunityId a : ev.communities)
                for (CommunityId b : ev.communities)
                    if (a < b) {
                        next[a - 1][b - 1] = clamp01(next[a - 1][b - 1] * ev.factor);
                        next[b - 1][a - 1] = next[a - 1][b - 1];
                    }
            break;
        case EventKind::MatrixRegenerate:
            next = sample_dominant_block_matrix(
                k, derive_seed(seed_, "matrix", static_cast<std::uint64_t>(ev.t)));
            break;
        case EventKind::ClRegenerate:
            throw std::invalid_argument("sbm: cl-regenerate applies to BTER only");
        }
        epochs_.push_back({ev.t, std::move(next)});
    }

    block_of_ = blocks_from_sizes(cfg_.community_sizes);
    length_ = T;
    universe_.resize(block_of_.size());
    std::iota(universe_.begin(), universe_.end(), 0u);
    truth_.schedule = std::move(schedule);
    truth_.assignment = planted_assignment(block_of_);
}

const std::vector<std::vector<double>>& SbmSequence::block_matrix_at(int t) const {
    const std::vector<std::vector<double>>* active = &epochs_.front().second;
    for (const auto& [from_t, m] : epochs_)
        if (from_t <= t) active = &m;
    return *active;
}

Snapshot SbmSequence::snapshot(int t) const {
    if (t < 1 || t > length_) throw std::out_of_range("sbm: t outside 1..T");
    const auto& matrix = block_matrix_at(t);
    const std::uint32_t n = static_cast<std::uint32_t>(block_of_.size());
    Snapshot snap;
    snap.t = t;
    snap.directed = false;
    snap.nodes = universe_;
    for (NodeId u = 0; u < n; ++u) {
        const auto& row = matrix[block_of_[u] - 1];
        for (NodeId v = u + 1; v < n; ++v) {
            double w = pair_weight(seed_, t, u, v, row[block_of_[v] - 1], cfg_.trials);
            if (w > 0.0) snap.edges.push_back({u, v, w});
        }
    }
    return snap;
}

// ---- BTER --------------------------------------------------------------------

BterSequence::BterSequence(BterConfig cfg, int T, EventSchedule schedule,
                           std::uint64_t seed)
    : cfg_(std::move(cfg)), seed_(seed) {
    if (cfg_.trials < 1) throw std::invalid_argument("bter: trials must be >= 1");
    Rng init(derive_seed(seed_, "bter-init"));

    std::vector<std::uint32_t> sizes = cfg_.community_sizes;
    if (sizes.empty()) {
        if (cfg_.k == 0 || cfg_.n == 0)
            throw std::invalid_argument("bter: n and k required to sample sizes");
        // discrete power law on [size_min, size_max], rejected until the sum is n
        std::vector<double> pmf;
        for (std::uint32_t s = cfg_.size_min; s <= cfg_.size_max; ++s)
            pmf.push_back(std::pow(static_cast<double>(s), -cfg_.size_exponent));
        double pmf_sum = std::accumulate(pmf.begin(), pmf.end(), 0.0);
        for (int attempt = 0; attempt < 1000000; ++attempt) {
            sizes.clear();
            std::uint64_t total = 0;
            for (std::uint32_t c = 0; c < cfg_.k; ++c) {
                double u = init.next_double() * pmf_sum;
                std::uint32_t s = cfg_.size_min;
                for (double acc = 0.0; s < cfg_.size_max; ++s) {
                    acc += pmf[s - cfg_.size_min];
                    if (u < acc) break;
                }
                sizes.push_back(s);
                total += s;
            }
            if (total == cfg_.n) break;
            sizes.clear();
        }
        if (sizes.empty())
            throw std::runtime_error("bter: size sampling failed to hit n; adjust bounds");
        std::sort(sizes.begin(), sizes.end(), std::greater<>());
    } else if (!std::is_sorted(sizes.begin(), sizes.end(), std::greater<>())) {
        throw std::invalid_argument("bter: community sizes must be sorted descending");
    }
    const std::uint32_t k = static_cast<std::uint32_t>(sizes.size());
    const std::uint32_t n =
        std::accumulate(sizes.begin(), sizes.end(), std::uint32_t{0});
    check_schedule(schedule, T, k);

    Epoch first;
    first.from_t = 1;
    first.er_probs = cfg_.er_probs;
    if (first.er_probs.empty()) {
        for (std::uint32_t c = 0; c < k; ++c)
            first.er_probs.push_back(0.5 * init.beta(2.0, 5.0));
    } else if (first.er_probs.size() != k) {
        throw std::invalid_argument("bter: er_probs size mismatch");
    }
    first.cl_weights = cfg_.cl_weights;
    if (first.cl_weights.empty()) {
        for (std::uint32_t u = 0; u < n; ++u)
            first.cl_weights.push_back(init.power_law(1.0, cfg_.cl_exponent));
    } else if (first.cl_weights.size() != n) {
        throw std::invalid_argument("bter: cl_weights size mismatch");
    }
    for (double w : first.cl_weights)
        if (!(w > 0.0)) throw std::invalid_argument("bter: cl weights must be > 0");
    first.cl_sum = std::accumulate(first.cl_weights.begin(), first.cl_weights.end(), 0.0);

    block_of_ = blocks_from_sizes(sizes);
    epochs_.push_back(std::move(first));
    for (const auto& ev : schedule) {
        Epoch next = epochs_.back();
        next.from_t = ev.t;
        switch (ev.kind) {
        case EventKind::RateScaleIntra:
            for (CommunityId c : ev.communities)
                next.er_probs[c - 1] = clamp01(next.er_probs[c - 1] * ev.factor);
            break;
        case EventKind::ClRegenerate: {
            Rng redraw(derive_seed(seed_, "cl", static_cast<std::uint64_t>(ev.t)));
            if (ev.communities.empty()) {
                for (std::uint32_t u = 0; u < n; ++u)
                    next.cl_weights[u] = redraw.power_law(1.0, cfg_.cl_exponent);
            } else {
                for (std::uint32_t u = 0; u < n; ++u)
                    if (std::find(ev.communities.begin(), ev.communities.end(),
                                  block_of_[u]) != ev.communities.end())
                        next.cl_weights[u] = redraw.power_law(1.0, cfg_.cl_exponent);
            }
            next.cl_sum =
                std::accumulate(next.cl_weights.begin(), next.cl_weights.end(), 0.0);
            break;
        }
        case EventKind::RateScaleInter:
        case EventKind::MatrixRegenerate:
            throw std::invalid_argument("bter: unsupported event kind for this model");
        }
        epochs_.push_back(std::move(next));
    }

    length_ = T;
    universe_.resize(n);
    std::iota(universe_.begin(), universe_.end(), 0u);
    truth_.schedule = std::move(schedule);
    truth_.assignment = planted_assignment(block_of_);
}

const BterSequence::Epoch& BterSequence::epoch_at(int t) const {
    const Epoch* active = &epochs_.front();
    for (const auto& e : epochs_)
        if (e.from_t <= t) active = &e;
    return *active;
}

double BterSequence::pair_probability_at(int t, NodeId u, NodeId v) const {
    const Epoch& e = epoch_at(t);
    if (block_of_[u] == block_of_[v]) return e.er_probs[block_of_[u] - 1];
    return std::min(1.0, e.cl_weights[u] * e.cl_weights[v] / e.cl_sum);
}

Snapshot BterSequence::snapshot(int t) const {
    if (t < 1 || t > length_) throw std::out_of_range("bter: t outside 1..T");
    const Epoch& e = epoch_at(t);
    const std::uint32_t n = static_cast<std::uint32_t>(block_of_.size());
    Snapshot snap;
    snap.t = t;
    snap.directed = false;
    snap.nodes = universe_;
    for (NodeId u = 0; u < n; ++u) {
        for (NodeId v = u + 1; v < n; ++v) {
            double p = block_of_[u] == block_of_[v]
                           ? e.er_probs[block_of_[u] - 1]
                           : std::min(1.0, e.cl_weights[u] * e.cl_weights[v] / e.cl_sum);
            double w = pair_weight(seed_, t, u, v, p, cfg_.trials);
            if (w > 0.0) snap.edges.push_back({u, v, w});
        }
    }
    return snap;
}

// ---- Convenience wrappers and presets ----------------------------------------

std::pair<DynamicNetwork, GroundTruth> sbm_generate(const SbmConfig& cfg, int T,
                                                    const EventSchedule& schedule,
                                                    std::uint64_t seed) {
    SbmSequence seq(cfg, T, schedule, seed);
    return {seq.materialize(), seq.truth()};
}

std::pair<DynamicNetwork, GroundTruth> bter_generate(const BterConfig& cfg, int T,
                                                     const EventSchedule& schedule,
                                                     std::uint64_t seed) {
    BterSequence seq(cfg, T, schedule, seed);
    return {seq.materialize(), seq.truth()};
}

std::pair<EventSchedule, EventSchedule> table1_schedules() {
    const double third_off = 2.0 / 3.0;
    EventSchedule sbm = {
        {16, EventScope::Local, EventKind::RateScaleIntra, {1}, third_off},
        {31, EventScope::Global, EventKind::RateScaleInter, {1, 2, 6, 7}, third_off},
        {51, EventScope::Local, EventKind::RateScaleIntra, {7, 8}, 2.0},
        {76, EventScope::Global, EventKind::MatrixRegenerate, {}, 1.0},
    };
    EventSchedule bter = {
        {16, EventScope::Local, EventKind::RateScaleIntra, {1}, third_off},
        {31, EventScope::Global, EventKind::ClRegenerate, {1}, 1.0},
        {51, EventScope::Local, EventKind::RateScaleIntra, {4, 5}, 2.0},
        {76, EventScope::Global, EventKind::ClRegenerate, {}, 1.0},
    };
    return {sbm, bter};
}

SbmConfig sbm_table1_config() {
    SbmConfig cfg;
    cfg.community_sizes = {300, 160, 130, 110, 100, 90, 60, 50};
    cfg.trials = 10;
    return cfg;
}

BterConfig bter_table1_config() {
    BterConfig cfg;
    cfg.n = 100;
    cfg.k = 5;
    // largest community 23% of the nodes, two smallest jointly 35%
    cfg.community_sizes = {23, 22, 20, 18, 17};
    cfg.trials = 10;
    return cfg;
}

} // namespace hcpd
