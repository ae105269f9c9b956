#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hcpd/community.hpp"
#include "hcpd/eval.hpp"
#include "hcpd/framework.hpp"
#include "hcpd/generators.hpp"
#include "hcpd/io.hpp"

namespace fs = std::filesystem;
using namespace hcpd;

namespace {

// Outputs created by the running command; removed again when it fails so a
// crash never leaves partial artifacts behind.
std::vector<fs::path> g_created;

void track(const fs::path& p) { g_created.push_back(p); }

void remove_partial_outputs() {
    for (const auto& p : g_created) {
        std::error_code ec;
        fs::remove_all(p, ec);
    }
}

void write_text_file(const fs::path& path, const std::string& content) {
    track(path);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

ValidationReport validate_streaming(const SequenceSource& src) {
    ValidationReport report;
    detail::NodeIndex universe(src.universe);
    for (int t = 1; t <= src.T; ++t) {
        Snapshot snap = src.snapshot(t);
        if (snap.t != t)
            report.issues.push_back({t, "gap in time indices (expected t=" +
                                            std::to_string(t) + ", found t=" +
                                            std::to_string(snap.t) + ")"});
        validate_snapshot(snap, universe, report);
        if (report.issues.size() > 20) break; // enough diagnostics
    }
    return report;
}

DetectorConfig make_config(const std::string& detector, int window, double epsilon,
                           double smoothing, std::uint64_t pair_budget,
                           std::uint64_t seed) {
    DetectorConfig cfg;
    if (detector == "deltacon")
        cfg.kind = DetectorKind::DeltaCon;
    else if (detector == "edge-monitoring")
        cfg.kind = DetectorKind::EdgeMonitoring;
    else
        throw std::runtime_error("unknown detector '" + detector + "'");
    cfg.window = window;
    cfg.epsilon_affinity = epsilon;
    cfg.smoothing = smoothing;
    cfg.pair_budget = pair_budget;
    cfg.pair_seed = seed;
    return cfg;
}

int run_generate(const std::string& model, const std::string& preset, int T, int trials,
                 std::uint64_t seed, const fs::path& out) {
    if (preset != "table1") throw std::runtime_error("unknown preset '" + preset + "'");
    auto [sbm_schedule, bter_schedule] = table1_schedules();
    track(out);
    if (model == "sbm") {
        SbmConfig cfg = sbm_table1_config();
        cfg.trials = trials;
        SbmSequence seq(cfg, T, sbm_schedule, seed);
        write_sequence(out, as_source(seq));
        write_assignment(out / "assignment.tsv", seq.truth().assignment);
        write_truth(out / "truth.tsv", seq.truth().schedule);
    } else if (model == "bter") {
        BterConfig cfg = bter_table1_config();
        cfg.trials = trials;
        BterSequence seq(cfg, T, bter_schedule, seed);
        write_sequence(out, as_source(seq));
        write_assignment(out / "assignment.tsv", seq.truth().assignment);
        write_truth(out / "truth.tsv", seq.truth().schedule);
    } else {
        throw std::runtime_error("unknown model '" + model + "'");
    }
    std::cout << "wrote " << model << " sequence (T=" << T << ") to " << out.string()
              << "\n";
    return 0;
}

int run_detect(const fs::path& in, const std::string& detector, int window, double level,
               int bootstrap, std::uint64_t seed, double epsilon, double smoothing,
               std::uint64_t pair_budget, const std::string& scopes,
               const std::string& partition_file, int threads, bool repartition,
               const fs::path& out, const fs::path& csv) {
    SequenceSource src = open_sequence(in);
    ValidationReport vr = validate_streaming(src);
    if (!vr.ok()) throw std::runtime_error("input failed validation: " + vr.to_string());

    DetectorConfig cfg = make_config(detector, window, epsilon, smoothing, pair_budget, seed);
    RunOptions opts;
    opts.level = level;
    opts.bootstrap_samples = bootstrap;
    opts.seed = seed;
    opts.threads = threads;
    opts.repartition_on_global = repartition;
    opts.include_contracted = scopes.find("contracted") != std::string::npos;
    opts.include_communities = scopes.find("communities") != std::string::npos;
    opts.include_original = scopes.find("original") != std::string::npos;
    if (!partition_file.empty()) opts.assignment = read_assignment(partition_file);

    ChangeReport report = run_hierarchical(src, cfg, opts);
    write_text_file(out, report_to_json(report));
    if (!csv.empty()) write_text_file(csv, report_to_csv(report));

    auto print_series = [](const ScoreSeries& s) {
        std::cout << s.scope << ": threshold=" << format_double(s.threshold) << " changes={";
        bool first = true;
        for (int t : s.changes) {
            if (!first) std::cout << ",";
            std::cout << t;
            first = false;
        }
        std::cout << "}\n";
    };
    if (report.contracted) print_series(*report.contracted);
    for (const auto& [c, series] : report.communities) print_series(series);
    if (report.original) print_series(*report.original);
    return 0;
}

int run_eval(const fs::path& report_file, const fs::path& truth_path, int slack,
             const fs::path& out_csv) {
    std::ifstream in(report_file);
    if (!in) throw std::runtime_error("cannot open " + report_file.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    ChangeReport report = report_scores_from_json(text);

    std::string csv = "metric,scope,value\n";
    auto add = [&csv](const std::string& metric, const std::string& scope, double v) {
        csv += metric + "," + scope + "," + format_double(v) + "\n";
        std::cout << metric << " " << scope << " = " << format_double(v) << "\n";
    };

    if (slack < 0)
        slack = report.config.kind == DetectorKind::EdgeMonitoring
                    ? report.config.window - 1
                    : 0;

    if (!truth_path.empty()) {
        fs::path truth_file = fs::is_directory(truth_path) ? truth_path / "truth.tsv"
                                                           : truth_path;
        EventSchedule schedule = read_truth(truth_file);
        std::vector<int> global_times;
        std::map<CommunityId, std::vector<int>> local_times;
        for (const auto& ev : schedule) {
            if (ev.scope == EventScope::Global) {
                global_times.push_back(ev.t);
            } else {
                for (CommunityId c : ev.communities) local_times[c].push_back(ev.t);
            }
        }
        if (report.contracted) {
            auto m = detection_metrics(report.contracted->changes, global_times, slack);
            add("precision", "contracted", m.precision);
            add("recall", "contracted", m.recall);
        }
        for (const auto& [c, times] : local_times) {
            auto it = report.communities.find(c);
            if (it == report.communities.end()) continue;
            auto m = detection_metrics(it->second.changes, times, slack);
            add("precision", it->second.scope, m.precision);
            add("recall", it->second.scope, m.recall);
        }
    }

    if (report.contracted && report.original)
        add("ndcg", "contracted-vs-original",
            ndcg(report.contracted->scores, report.original->scores));
    else
        std::cout << "ndcg skipped (report lacks contracted+original scopes)\n";

    if (!out_csv.empty()) write_text_file(out_csv, csv);
    return 0;
}

int run_bench(const fs::path& in, const std::string& detector, int window, double epsilon,
              double smoothing, std::uint64_t seed, int reps, const std::string& scopes_arg,
              const std::string& partition_file, const fs::path& out_csv) {
    // materialize so file parsing stays off the timed path
    DynamicNetwork net = read_sequence(in);
    SequenceSource src = as_source(net);
    DetectorConfig cfg = make_config(detector, window, epsilon, smoothing, 0, seed);
    CommunityAssignment partition;
    if (!partition_file.empty()) {
        partition = read_assignment(partition_file).canonicalized();
    } else {
        partition = louvain_partition(src.snapshot(1), seed).assignment;
    }
    std::vector<std::string> scopes;
    std::size_t start = 0;
    while (start < scopes_arg.size()) {
        std::size_t pos = scopes_arg.find(',', start);
        if (pos == std::string::npos) pos = scopes_arg.size();
        scopes.push_back(scopes_arg.substr(start, pos - start));
        start = pos + 1;
    }
    BenchResult result = bench(src, cfg, partition, scopes, reps, seed);
    std::string csv = bench_to_csv(result);
    std::cout << csv;
    if (result.speedup > 0.0)
        std::cout << "speedup original/contracted = " << format_double(result.speedup)
                  << "X\n";
    if (!out_csv.empty()) write_text_file(out_csv, csv);
    return 0;
}

int run_ingest(const fs::path& csv, const fs::path& out, bool symmetrize_flag,
               bool scale_flag) {
    track(out);
    ingest_csv(csv, out, symmetrize_flag, scale_flag);
    SequenceManifest m = read_manifest(out);
    std::cout << "ingested " << m.T << " snapshots over " << m.nodes << " nodes into "
              << out.string() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hierarchical change point detection on dynamic networks"};
    app.require_subcommand(1);
    app.set_config("--config", "", "read options from a key=value file");

    // generate
    auto* gen = app.add_subcommand("generate", "write a seeded synthetic sequence");
    std::string gen_model;
    std::string gen_preset = "table1";
    int gen_t = kTable1Length;
    int gen_trials = 10;
    std::uint64_t gen_seed = 0;
    std::string gen_out;
    gen->add_option("--model", gen_model, "sbm|bter")->required();
    gen->add_option("--preset", gen_preset, "preset name (table1)");
    gen->add_option("--t", gen_t, "sequence length");
    gen->add_option("--trials", gen_trials, "binomial trials for edge weights");
    gen->add_option("--seed", gen_seed, "rng seed")->required();
    gen->add_option("--out", gen_out, "output directory")->required();

    // detect
    auto* det = app.add_subcommand("detect", "run hierarchical change point detection");
    std::string det_in, det_detector, det_scopes = "contracted,communities";
    std::string det_partition, det_out, det_csv;
    int det_window = 4, det_bootstrap = 1000, det_threads = 1;
    double det_level = 0.95, det_epsilon = 0.0, det_smoothing = 1e-6;
    std::uint64_t det_seed = 0, det_pair_budget = 0;
    bool det_repartition = false;
    det->add_option("--in", det_in, "sequence directory")->required();
    det->add_option("--detector", det_detector, "deltacon|edge-monitoring")->required();
    det->add_option("--window", det_window, "edge-monitoring window");
    det->add_option("--level", det_level, "bootstrap confidence level");
    det->add_option("--bootstrap", det_bootstrap, "bootstrap resamples B");
    det->add_option("--seed", det_seed, "rng seed");
    det->add_option("--epsilon", det_epsilon, "deltacon epsilon; 0 = 1/(1+max degree)");
    det->add_option("--smoothing", det_smoothing, "edge-monitoring probability clamp");
    det->add_option("--pair-budget", det_pair_budget, "monitored pairs per scope; 0 = all");
    det->add_option("--scopes", det_scopes, "subset of contracted,communities,original");
    det->add_option("--partition", det_partition, "assignment file (default: Louvain on G_1)");
    det->add_option("--threads", det_threads, "worker threads (same output for any value)");
    det->add_flag("--repartition", det_repartition, "repartition after flagged global changes");
    det->add_option("--out", det_out, "report JSON path")->required();
    det->add_option("--csv", det_csv, "plot-ready CSV path");

    // eval
    auto* ev = app.add_subcommand("eval", "metrics for a detection report");
    std::string ev_report, ev_truth, ev_out;
    int ev_slack = -1;
    ev->add_option("--report", ev_report, "report JSON from detect")->required();
    ev->add_option("--truth", ev_truth, "truth.tsv file or generated directory");
    ev->add_option("--slack", ev_slack, "matching slack (default window-1)");
    ev->add_option("--out", ev_out, "metrics CSV path");

    // bench
    auto* be = app.add_subcommand("bench", "timing comparison per scope");
    std::string be_in, be_detector, be_scopes = "original,contracted";
    std::string be_partition, be_out;
    int be_window = 4, be_reps = 3;
    double be_epsilon = 0.0, be_smoothing = 1e-6;
    std::uint64_t be_seed = 0;
    be->add_option("--in", be_in, "sequence directory")->required();
    be->add_option("--detector", be_detector, "deltacon|edge-monitoring")->required();
    be->add_option("--window", be_window, "edge-monitoring window");
    be->add_option("--epsilon", be_epsilon, "deltacon epsilon; 0 = auto");
    be->add_option("--smoothing", be_smoothing, "edge-monitoring probability clamp");
    be->add_option("--seed", be_seed, "rng seed");
    be->add_option("--reps", be_reps, "timed repetitions per scope");
    be->add_option("--scopes", be_scopes, "comma list of original,contracted,communities");
    be->add_option("--partition", be_partition, "assignment file (default: Louvain on G_1)");
    be->add_option("--out", be_out, "timing CSV path");

    // ingest
    auto* ing = app.add_subcommand("ingest", "convert a t,u,v,w CSV into a sequence dir");
    std::string ing_csv, ing_out;
    bool ing_symmetrize = false;
    bool ing_scale = false;
    ing->add_option("--csv", ing_csv, "input CSV with header t,u,v,w")->required();
    ing->add_option("--out", ing_out, "output directory")->required();
    ing->add_flag("--symmetrize", ing_symmetrize, "fold directions: w(u,v)=w(u->v)+w(v->u)");
    ing->add_flag("--scale-weights", ing_scale, "divide weights by the global maximum");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed())
            return run_generate(gen_model, gen_preset, gen_t, gen_trials, gen_seed, gen_out);
        if (det->parsed())
            return run_detect(det_in, det_detector, det_window, det_level, det_bootstrap,
                              det_seed, det_epsilon, det_smoothing, det_pair_budget,
                              det_scopes, det_partition, det_threads, det_repartition,
                              det_out, det_csv);
        if (ev->parsed()) return run_eval(ev_report, ev_truth, ev_slack, ev_out);
        if (be->parsed())
            return run_bench(be_in, be_detector, be_window, be_epsilon, be_smoothing,
                             be_seed, be_reps, be_scopes, be_partition, be_out);
        if (ing->parsed()) return run_ingest(ing_csv, ing_out, ing_symmetrize, ing_scale);
    } catch (const std::exception& ex) {
        remove_partial_outputs();
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 0;
}
