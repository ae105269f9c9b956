// End-to-end checks of the command-line surface: every subcommand runnable
// from an empty directory with documented flags, failure behavior, and
// byte-stable reports.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;

namespace {

int failures = 0;

void check(bool ok, const std::string& what) {
    if (ok) {
        std::cout << "[ok] " << what << "\n";
    } else {
        ++failures;
        std::cout << "[FAILED] " << what << "\n";
    }
}

int run(const std::string& args, const fs::path& stdout_file = {},
        const fs::path& stderr_file = {}) {
    std::string cmd = std::string(HCPD_CLI_PATH) + " " + args;
    if (!stdout_file.empty()) cmd += " > " + stdout_file.string();
    if (!stderr_file.empty()) cmd += " 2> " + stderr_file.string();
    int status = std::system(cmd.c_str());
    return status;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string without_timings(const fs::path& report) {
    auto j = nlohmann::ordered_json::parse(slurp(report));
    j.erase("timings");
    return j.dump();
}

} // namespace

int main() {
    fs::path work = fs::temp_directory_path() / "hcpd_cli_test";
    fs::remove_all(work);
    fs::create_directories(work);

    // generate -> detect -> eval, documented flags only
    check(run("generate --model bter --preset table1 --seed 7 --out " +
              (work / "seq").string()) == 0,
          "generate bter sequence");
    check(fs::exists(work / "seq" / "manifest.txt"), "manifest written");
    check(fs::exists(work / "seq" / "snapshot_0100.tsv"), "snapshots written");
    check(fs::exists(work / "seq" / "assignment.tsv"), "planted assignment written");
    check(fs::exists(work / "seq" / "truth.tsv"), "ground truth written");

    std::string detect_args =
        "detect --in " + (work / "seq").string() +
        " --detector edge-monitoring --window 2 --level 0.95 --bootstrap 200 --seed 7" +
        " --partition " + (work / "seq" / "assignment.tsv").string() +
        " --scopes contracted,communities,original" + " --out " +
        (work / "report.json").string() + " --csv " + (work / "report.csv").string();
    check(run(detect_args) == 0, "detect runs");
    check(fs::exists(work / "report.json"), "report written");
    {
        std::string csv = slurp(work / "report.csv");
        check(csv.rfind("scope,t,score,threshold,is_change\n", 0) == 0, "csv header");
        check(csv.find("contracted,") != std::string::npos, "csv has contracted scope");
    }

    {
        // the generated global events surface in the contracted change set
        auto j = nlohmann::ordered_json::parse(slurp(work / "report.json"));
        std::set<int> changes;
        for (const auto& scope : j.at("scopes"))
            if (scope.at("scope") == "contracted")
                for (const auto& c : scope.at("changes")) changes.insert(c.get<int>());
        auto near = [&](int ev) {
            return changes.count(ev) || changes.count(ev - 1) || changes.count(ev + 1);
        };
        check(near(31) && near(76), "contracted changes cover the global events");
        check(!changes.count(16), "contracted changes skip the local event");
    }

    check(run("eval --report " + (work / "report.json").string() + " --truth " +
                  (work / "seq").string() + " --out " + (work / "metrics.csv").string(),
              work / "eval_out.txt") == 0,
          "eval runs");
    {
        std::string out = slurp(work / "eval_out.txt");
        check(out.find("ndcg") != std::string::npos, "eval prints ndcg");
        check(out.find("precision") != std::string::npos, "eval prints precision");
    }

    // same argv + same seed = byte-identical report (timings excluded)
    std::string detect_args2 = detect_args;
    auto pos = detect_args2.find("report.json");
    detect_args2.replace(pos, 11, "report2.json");
    pos = detect_args2.find("report.csv");
    detect_args2.replace(pos, 10, "report2.csv");
    check(run(detect_args2) == 0, "second detect runs");
    check(without_timings(work / "report.json") == without_timings(work / "report2.json"),
          "reports byte-identical once timings are dropped");
    check(slurp(work / "report.csv") == slurp(work / "report2.csv"),
          "plot CSVs byte-identical");

    // thread count must not change the scores
    std::string detect_threads = detect_args;
    pos = detect_threads.find("report.json");
    detect_threads.replace(pos, 11, "report4.json");
    pos = detect_threads.find("report.csv");
    detect_threads.replace(pos, 10, "report4.csv");
    detect_threads += " --threads 3";
    check(run(detect_threads) == 0, "threaded detect runs");
    check(slurp(work / "report.csv") == slurp(work / "report4.csv"),
          "thread count does not change the scores");

    // validation failure: negative weight must name t and the edge, exit != 0
    {
        fs::path bad = work / "bad";
        fs::create_directories(bad);
        std::ofstream(bad / "manifest.txt") << "T=2\ndirected=0\nnodes=3\n";
        std::ofstream(bad / "snapshot_0001.tsv") << "0\t1\t1\n";
        std::ofstream(bad / "snapshot_0002.tsv") << "0\t1\t-1\n";
        int status = run("detect --in " + bad.string() +
                             " --detector deltacon --out " + (work / "nope.json").string(),
                         work / "bad_out.txt", work / "bad_err.txt");
        check(status != 0, "detect fails on invalid input");
        std::string err = slurp(work / "bad_err.txt");
        check(err.find("t=2") != std::string::npos, "diagnostic names t");
        check(err.find("(0,1)") != std::string::npos, "diagnostic names the edge");
        check(!fs::exists(work / "nope.json"), "no partial report left behind");
    }

    // eval identity case: identical contracted and original rankings -> NDCG 1
    {
        nlohmann::ordered_json j;
        j["config"] = {{"detector", "edge-monitoring"}, {"window", 2},
                       {"epsilonAffinity", 0.0},       {"smoothing", 1e-6},
                       {"pairBudget", 0},              {"level", 0.95},
                       {"bootstrap", 100},             {"seed", 0},
                       {"threads", 1},                 {"repartitionOnGlobal", false}};
        j["partition"] = {{"source", "provided"}, {"k", 1}, {"assignment", {{0, 1}}}};
        nlohmann::ordered_json scores = nlohmann::ordered_json::array();
        for (int t = 2; t <= 6; ++t)
            scores.push_back({{"t", t}, {"score", 0.1 * t}});
        nlohmann::ordered_json contracted = {{"scope", "contracted"},
                                             {"threshold", 1.0},
                                             {"changes", nlohmann::json::array()},
                                             {"scores", scores}};
        nlohmann::ordered_json original = contracted;
        original["scope"] = "original";
        j["scopes"] = {contracted, original};
        j["repartitions"] = nlohmann::json::array();
        std::ofstream(work / "identity.json") << j.dump(2);
        check(run("eval --report " + (work / "identity.json").string(),
                  work / "identity_out.txt") == 0,
              "eval identity report");
        std::string out = slurp(work / "identity_out.txt");
        check(out.find("ndcg contracted-vs-original = 1") != std::string::npos,
              "identity rankings print NDCG 1.0");
    }

    // ingest path
    {
        std::ofstream csv(work / "raw.csv");
        csv << "t,u,v,w\n2001,10,20,1.5\n2001,20,10,0.5\n2002,10,30,2.0\n";
        csv.close();
        check(run("ingest --csv " + (work / "raw.csv").string() + " --symmetrize --out " +
                  (work / "ingested").string()) == 0,
              "ingest runs");
        check(fs::exists(work / "ingested" / "manifest.txt"), "ingested manifest");
        check(fs::exists(work / "ingested" / "nodes.tsv"), "ingest id mapping");
        // the ingested directory is detectable end-to-end
        check(run("detect --in " + (work / "ingested").string() +
                  " --detector deltacon --seed 1 --scopes contracted,communities --out " +
                  (work / "ingested_report.json").string()) == 0,
              "detect on ingested data");
    }

    // options can come from a key=value config file
    {
        std::ofstream ini(work / "run.ini");
        ini << "[detect]\n";
        ini << "in = \"" << (work / "seq").string() << "\"\n";
        ini << "detector = \"edge-monitoring\"\n";
        ini << "window = 2\nbootstrap = 200\nseed = 7\n";
        ini << "partition = \"" << (work / "seq" / "assignment.tsv").string() << "\"\n";
        ini << "scopes = \"contracted,communities,original\"\n";
        ini << "out = \"" << (work / "report3.json").string() << "\"\n";
        ini.close();
        check(run("--config " + (work / "run.ini").string() + " detect") == 0,
              "detect configured from a key=value file");
        check(without_timings(work / "report.json") ==
                  without_timings(work / "report3.json"),
              "config-file run matches the flag run");
    }

    // bench on a small sequence
    check(run("bench --in " + (work / "seq").string() +
                  " --detector deltacon --reps 3 --seed 7 --partition " +
                  (work / "seq" / "assignment.tsv").string() + " --out " +
                  (work / "bench.csv").string(),
              work / "bench_out.txt") == 0,
          "bench runs");
    {
        std::string out = slurp(work / "bench_out.txt");
        check(out.find("speedup") != std::string::npos, "bench prints speedup");
    }

    if (failures == 0) fs::remove_all(work);
    std::cout << (failures == 0 ? "CLI TESTS PASSED" : "CLI TESTS FAILED") << "\n";
    return failures == 0 ? 0 : 1;
}
