#include "hcpd/framework.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "hcpd/io.hpp"
#include "hcpd/rng.hpp"
#include "hcpd/thresholding.hpp"

namespace hcpd {

using ordered_json = nlohmann::ordered_json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct ScopeState {
    std::string name;
    std::vector<NodeId> nodes;
    std::unique_ptr<ScopeScorer> scorer; // null for scopes too small to score
    double epsilon = 0.0;
    double wall = 0.0;
};

std::vector<double> scores_in_order(const std::map<int, double>& scores) {
    std::vector<double> out;
    out.reserve(scores.size());
    for (const auto& [t, s] : scores) out.push_back(s);
    return out;
}

} // namespace

const ScoreSeries* ChangeReport::find_scope(const std::string& name) const {
    if (contracted && contracted->scope == name) return &*contracted;
    if (original && original->scope == name) return &*original;
    for (const auto& [id, series] : communities)
        if (series.scope == name) return &series;
    return nullptr;
}

std::string scope_name(const ScoreSeries& s) { return s.scope; }

ChangeReport run_hierarchical(const SequenceSource& seq, const DetectorConfig& cfg,
                              const RunOptions& opts) {
    if (seq.T < 2) throw std::invalid_argument("run: need at least two snapshots");
    if (cfg.kind == DetectorKind::EdgeMonitoring && 2 * cfg.window > seq.T)
        throw std::invalid_argument("run: detector window exceeds the sequence length");

    ChangeReport report;
    report.config = cfg;
    report.options = opts;

    // directed inputs fold to undirected (sum of both directions) before any
    // partitioning or scoring
    auto fetch = [&seq](int t) {
        Snapshot g = seq.snapshot(t);
        return g.directed ? symmetrize(g) : g;
    };

    if (opts.assignment) {
        report.partition = opts.assignment->canonicalized();
        report.partition_source = "provided";
        for (NodeId n : seq.universe) report.partition.community_of(n); // totality check
    } else {
        report.partition = louvain_partition(fetch(1), opts.seed).assignment;
        report.partition_source = "louvain";
    }
    const CommunityAssignment& partition = report.partition;
    const std::uint32_t k = partition.community_count();

    std::vector<ScopeState> scopes;
    if (opts.include_contracted) {
        ScopeState s;
        s.name = "contracted";
        s.nodes.resize(k);
        for (CommunityId c = 1; c <= k; ++c) s.nodes[c - 1] = c;
        scopes.push_back(std::move(s));
    }
    std::vector<std::vector<NodeId>> members(k);
    if (opts.include_communities) {
        for (CommunityId c = 1; c <= k; ++c) {
            ScopeState s;
            s.name = "community:" + std::to_string(c);
            members[c - 1] = partition.members(c);
            s.nodes = members[c - 1];
            scopes.push_back(std::move(s));
        }
    } else {
        for (CommunityId c = 1; c <= k; ++c) members[c - 1] = partition.members(c);
    }
    if (opts.include_original) {
        ScopeState s;
        s.name = "original";
        s.nodes = seq.universe;
        scopes.push_back(std::move(s));
    }

    // Resolve the affinity epsilon per scope: an extra degree-only pass when
    // the config asks for auto (epsilon keeps one value across the series).
    if (cfg.kind == DetectorKind::DeltaCon) {
        if (cfg.epsilon_affinity > 0.0) {
            for (auto& s : scopes) s.epsilon = cfg.epsilon_affinity;
        } else {
            std::map<std::string, double> max_degree;
            for (auto& s : scopes) max_degree[s.name] = 0.0;
            for (int t = 1; t <= seq.T; ++t) {
                Snapshot g = fetch(t);
                for (auto& s : scopes) {
                    const Snapshot* view = nullptr;
                    Snapshot local;
                    if (s.name == "contracted") {
                        local = contract(g, partition);
                        view = &local;
                    } else if (s.name == "original") {
                        view = &g;
                    } else {
                        CommunityId c =
                            static_cast<CommunityId>(std::stoul(s.name.substr(10)));
                        local = induced_subgraph(g, partition, c);
                        view = &local;
                    }
                    for (double d : weighted_degrees(*view))
                        max_degree[s.name] = std::max(max_degree[s.name], d);
                }
            }
            for (auto& s : scopes) s.epsilon = auto_epsilon(max_degree[s.name]);
        }
        for (auto& s : scopes) report.epsilon_used[s.name] = s.epsilon;
    }

    for (auto& s : scopes) {
        // a scope with fewer than two nodes has nothing to monitor
        if (cfg.kind == DetectorKind::EdgeMonitoring && s.nodes.size() < 2) continue;
        s.scorer = make_scorer(cfg, s.nodes, s.epsilon, opts.threads);
    }

    // Single streaming pass; each scope's view construction counts toward
    // that scope's wall time.
    for (int t = 1; t <= seq.T; ++t) {
        Snapshot g = fetch(t);
        for (auto& s : scopes) {
            if (!s.scorer) continue;
            auto start = Clock::now();
            if (s.name == "contracted") {
                Snapshot view = contract(g, partition);
                s.scorer->push(view);
            } else if (s.name == "original") {
                s.scorer->push(g);
            } else {
                CommunityId c = static_cast<CommunityId>(std::stoul(s.name.substr(10)));
                Snapshot view;
                view.t = g.t;
                view.directed = g.directed;
                view.nodes = members[c - 1];
                for (const auto& e : g.edges)
                    if (partition.community_of(e.u) == c && partition.community_of(e.v) == c)
                        view.edges.push_back(e);
                s.scorer->push(view);
            }
            s.wall += seconds_since(start);
        }
    }

    for (auto& s : scopes) {
        auto start = Clock::now();
        ScoreSeries series;
        series.scope = s.name;
        if (s.scorer) series.scores = s.scorer->take_scores();
        auto values = scores_in_order(series.scores);
        if (values.size() >= 2) {
            series.threshold = bootstrap_threshold(
                values, opts.level, opts.bootstrap_samples, derive_seed(opts.seed, s.name));
        } else {
            // one score (or none) gives nothing to bootstrap; flag nothing
            series.threshold = values.empty() ? 0.0 : values.front();
        }
        series.changes = extract_changes(series.scores, series.threshold);
        s.wall += seconds_since(start);
        report.wall_seconds[s.name] = s.wall;
        if (s.name == "contracted") {
            report.contracted = std::move(series);
        } else if (s.name == "original") {
            report.original = std::move(series);
        } else {
            CommunityId c = static_cast<CommunityId>(std::stoul(s.name.substr(10)));
            report.communities[c] = std::move(series);
        }
    }

    if (opts.repartition_on_global)
        report.repartitions = repartition_on_global_change(seq, report);
    return report;
}

std::vector<RepartitionRecord> repartition_on_global_change(const SequenceSource& seq,
                                                            const ChangeReport& report) {
    std::vector<RepartitionRecord> records;
    if (!report.contracted) return records;
    for (int t_star : report.contracted->changes) {
        Snapshot g = seq.snapshot(t_star);
        if (g.directed) g = symmetrize(g);
        PartitionResult part = louvain_partition(g, report.options.seed);
        records.push_back({t_star, part.assignment, part.modularity});
    }
    return records;
}

namespace {

ordered_json series_to_json(const ScoreSeries& s) {
    ordered_json j;
    j["scope"] = s.scope;
    j["threshold"] = s.threshold;
    j["changes"] = s.changes;
    ordered_json scores = ordered_json::array();
    for (const auto& [t, v] : s.scores) scores.push_back({{"t", t}, {"score", v}});
    j["scores"] = std::move(scores);
    return j;
}

ScoreSeries series_from_json(const ordered_json& j) {
    ScoreSeries s;
    s.scope = j.at("scope").get<std::string>();
    s.threshold = j.at("threshold").get<double>();
    for (const auto& c : j.at("changes")) s.changes.insert(c.get<int>());
    for (const auto& row : j.at("scores"))
        s.scores[row.at("t").get<int>()] = row.at("score").get<double>();
    return s;
}

std::string detector_name(DetectorKind k) {
    return k == DetectorKind::DeltaCon ? "deltacon" : "edge-monitoring";
}

} // namespace

std::string report_to_json(const ChangeReport& report, bool include_timings) {
    ordered_json j;
    ordered_json cfg;
    cfg["detector"] = detector_name(report.config.kind);
    cfg["window"] = report.config.window;
    cfg["epsilonAffinity"] = report.config.epsilon_affinity;
    cfg["smoothing"] = report.config.smoothing;
    cfg["pairBudget"] = report.config.pair_budget;
    cfg["level"] = report.options.level;
    cfg["bootstrap"] = report.options.bootstrap_samples;
    cfg["seed"] = report.options.seed;
    cfg["threads"] = report.options.threads;
    cfg["repartitionOnGlobal"] = report.options.repartition_on_global;
    if (!report.epsilon_used.empty()) cfg["epsilonResolved"] = report.epsilon_used;
    j["config"] = std::move(cfg);

    ordered_json part;
    part["source"] = report.partition_source;
    part["k"] = report.partition.community_count();
    ordered_json assign = ordered_json::array();
    for (std::size_t i = 0; i < report.partition.nodes().size(); ++i)
        assign.push_back({report.partition.nodes()[i], report.partition.labels()[i]});
    part["assignment"] = std::move(assign);
    j["partition"] = std::move(part);

    ordered_json scopes = ordered_json::array();
    if (report.contracted) scopes.push_back(series_to_json(*report.contracted));
    for (const auto& [c, series] : report.communities)
        scopes.push_back(series_to_json(series));
    if (report.original) scopes.push_back(series_to_json(*report.original));
    j["scopes"] = std::move(scopes);

    ordered_json reparts = ordered_json::array();
    for (const auto& r : report.repartitions)
        reparts.push_back({{"t", r.t},
                           {"k", r.assignment.community_count()},
                           {"modularity", r.modularity}});
    j["repartitions"] = std::move(reparts);

    if (include_timings) {
        ordered_json timings;
        for (const auto& [name, secs] : report.wall_seconds) timings[name] = secs;
        j["timings"] = std::move(timings);
    }
    return j.dump(2) + "\n";
}

ChangeReport report_scores_from_json(const std::string& json_text) {
    ordered_json j = ordered_json::parse(json_text);
    ChangeReport report;
    const auto& cfg = j.at("config");
    report.config.kind = cfg.at("detector").get<std::string>() == "deltacon"
                             ? DetectorKind::DeltaCon
                             : DetectorKind::EdgeMonitoring;
    report.config.window = cfg.at("window").get<int>();
    report.config.epsilon_affinity = cfg.at("epsilonAffinity").get<double>();
    report.config.smoothing = cfg.at("smoothing").get<double>();
    report.options.level = cfg.at("level").get<double>();
    report.options.bootstrap_samples = cfg.at("bootstrap").get<int>();
    report.options.seed = cfg.at("seed").get<std::uint64_t>();
    for (const auto& scope : j.at("scopes")) {
        ScoreSeries s = series_from_json(scope);
        if (s.scope == "contracted")
            report.contracted = std::move(s);
        else if (s.scope == "original")
            report.original = std::move(s);
        else if (s.scope.rfind("community:", 0) == 0)
            report.communities[static_cast<CommunityId>(std::stoul(s.scope.substr(10)))] =
                std::move(s);
    }
    return report;
}

std::string report_to_csv(const ChangeReport& report) {
    std::string csv = "scope,t,score,threshold,is_change\n";
    auto emit = [&csv](const ScoreSeries& s) {
        for (const auto& [t, v] : s.scores) {
            csv += s.scope;
            csv += ',';
            csv += std::to_string(t);
            csv += ',';
            csv += format_double(v);
            csv += ',';
            csv += format_double(s.threshold);
            csv += ',';
            csv += s.changes.count(t) ? '1' : '0';
            csv += '\n';
        }
    };
    if (report.contracted) emit(*report.contracted);
    for (const auto& [c, series] : report.communities) emit(series);
    if (report.original) emit(*report.original);
    return csv;
}

} // namespace hcpd
