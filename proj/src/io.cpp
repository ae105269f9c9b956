#include "hcpd/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace hcpd {

namespace fs = std::filesystem;

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

double parse_double(std::string_view s, const std::string& context) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw std::runtime_error(context + ": bad number '" + std::string(s) + "'");
    return v;
}

std::uint64_t parse_u64(std::string_view s, const std::string& context) {
    std::uint64_t v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw std::runtime_error(context + ": bad integer '" + std::string(s) + "'");
    return v;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

std::string snapshot_filename(int t) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "snapshot_%04d.tsv", t);
    return buf;
}

Snapshot read_snapshot_file(const fs::path& file, int t, bool directed) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open " + file.string());
    Snapshot snap;
    snap.t = t;
    snap.directed = directed;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto fields = split(line, '\t');
        if (fields.size() != 3)
            throw std::runtime_error(file.string() + ":" + std::to_string(lineno) +
                                     ": expected u<TAB>v<TAB>w");
        Edge e;
        e.u = static_cast<NodeId>(parse_u64(fields[0], file.string()));
        e.v = static_cast<NodeId>(parse_u64(fields[1], file.string()));
        e.w = parse_double(fields[2], file.string());
        snap.edges.push_back(e);
    }
    return snap;
}

} // namespace

SequenceSource as_source(const DynamicNetwork& net) {
    SequenceSource src;
    src.T = net.length();
    src.universe = net.node_universe;
    src.snapshot = [&net](int t) -> Snapshot {
        if (t < 1 || t > net.length()) throw std::out_of_range("snapshot t outside 1..T");
        return net.snapshots[t - 1];
    };
    return src;
}

SequenceSource as_source(const GeneratedSequence& generated) {
    SequenceSource src;
    src.T = generated.length();
    src.universe = generated.universe();
    src.snapshot = [&generated](int t) { return generated.snapshot(t); };
    return src;
}

void write_sequence(const fs::path& dir, const SequenceSource& source, bool directed) {
    fs::create_directories(dir);
    {
        std::ofstream manifest(dir / "manifest.txt");
        if (!manifest) throw std::runtime_error("cannot write " + (dir / "manifest.txt").string());
        manifest << "T=" << source.T << "\n";
        manifest << "directed=" << (directed ? 1 : 0) << "\n";
        manifest << "nodes=" << source.universe.size() << "\n";
    }
    for (int t = 1; t <= source.T; ++t) {
        Snapshot snap = source.snapshot(t);
        std::ofstream out(dir / snapshot_filename(t));
        if (!out) throw std::runtime_error("cannot write snapshot file for t=" + std::to_string(t));
        std::string buffer;
        buffer.reserve(snap.edges.size() * 16);
        for (const auto& e : snap.edges) {
            buffer += std::to_string(e.u);
            buffer += '\t';
            buffer += std::to_string(e.v);
            buffer += '\t';
            buffer += format_double(e.w);
            buffer += '\n';
        }
        out << buffer;
    }
}

SequenceManifest read_manifest(const fs::path& dir) {
    std::ifstream in(dir / "manifest.txt");
    if (!in) throw std::runtime_error("cannot open " + (dir / "manifest.txt").string());
    SequenceManifest m;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("manifest: expected key=value, got '" + line + "'");
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        if (key == "T")
            m.T = static_cast<int>(parse_u64(value, "manifest T"));
        else if (key == "directed")
            m.directed = parse_u64(value, "manifest directed") != 0;
        else if (key == "nodes")
            m.nodes = static_cast<std::uint32_t>(parse_u64(value, "manifest nodes"));
        else
            throw std::runtime_error("manifest: unknown key '" + key + "'");
    }
    if (m.T <= 0) throw std::runtime_error("manifest: missing or invalid T");
    return m;
}

SequenceSource open_sequence(const fs::path& dir) {
    SequenceManifest m = read_manifest(dir);
    SequenceSource src;
    src.T = m.T;
    src.universe.resize(m.nodes);
    for (std::uint32_t i = 0; i < m.nodes; ++i) src.universe[i] = i;
    std::vector<NodeId> universe = src.universe;
    bool directed = m.directed;
    src.snapshot = [dir, universe, directed](int t) {
        Snapshot snap = read_snapshot_file(dir / snapshot_filename(t), t, directed);
        snap.nodes = universe;
        return snap;
    };
    return src;
}

DynamicNetwork read_sequence(const fs::path& dir) {
    SequenceSource src = open_sequence(dir);
    DynamicNetwork net;
    net.node_universe = src.universe;
    net.snapshots.reserve(src.T);
    for (int t = 1; t <= src.T; ++t) net.snapshots.push_back(src.snapshot(t));
    return net;
}

void write_assignment(const fs::path& file, const CommunityAssignment& a) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot write " + file.string());
    for (std::size_t i = 0; i < a.nodes().size(); ++i)
        out << a.nodes()[i] << '\t' << a.labels()[i] << '\n';
}

CommunityAssignment read_assignment(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open " + file.string());
    std::vector<NodeId> nodes;
    std::vector<CommunityId> labels;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto fields = split(line, '\t');
        if (fields.size() != 2)
            throw std::runtime_error(file.string() + ":" + std::to_string(lineno) +
                                     ": expected node<TAB>community");
        nodes.push_back(static_cast<NodeId>(parse_u64(fields[0], "assignment")));
        labels.push_back(static_cast<CommunityId>(parse_u64(fields[1], "assignment")));
    }
    return CommunityAssignment(std::move(nodes), std::move(labels));
}

namespace {

std::string kind_name(EventKind k) {
    switch (k) {
    case EventKind::RateScaleIntra: return "rate-scale-intra";
    case EventKind::RateScaleInter: return "rate-scale-inter";
    case EventKind::MatrixRegenerate: return "matrix-regenerate";
    case EventKind::ClRegenerate: return "cl-regenerate";
    }
    return "?";
}

EventKind kind_from(std::string_view s) {
    if (s == "rate-scale-intra") return EventKind::RateScaleIntra;
    if (s == "rate-scale-inter") return EventKind::RateScaleInter;
    if (s == "matrix-regenerate") return EventKind::MatrixRegenerate;
    if (s == "cl-regenerate") return EventKind::ClRegenerate;
    throw std::runtime_error("truth: unknown event kind '" + std::string(s) + "'");
}

} // namespace

void write_truth(const fs::path& file, const EventSchedule& schedule) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot write " + file.string());
    for (const auto& ev : schedule) {
        out << ev.t << '\t' << (ev.scope == EventScope::Global ? "global" : "local")
            << '\t' << kind_name(ev.kind) << '\t';
        if (ev.communities.empty()) {
            out << '*';
        } else {
            for (std::size_t i = 0; i < ev.communities.size(); ++i) {
                if (i) out << ',';
                out << ev.communities[i];
            }
        }
        out << '\t' << format_double(ev.factor) << '\n';
    }
}

EventSchedule read_truth(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open " + file.string());
    EventSchedule schedule;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto fields = split(line, '\t');
        if (fields.size() != 5)
            throw std::runtime_error("truth: expected 5 tab-separated fields");
        ChangeEvent ev;
        ev.t = static_cast<int>(parse_u64(fields[0], "truth t"));
        if (fields[1] == "global")
            ev.scope = EventScope::Global;
        else if (fields[1] == "local")
            ev.scope = EventScope::Local;
        else
            throw std::runtime_error("truth: unknown scope '" + std::string(fields[1]) + "'");
        ev.kind = kind_from(fields[2]);
        if (fields[3] != "*")
            for (auto part : split(fields[3], ','))
                ev.communities.push_back(static_cast<CommunityId>(parse_u64(part, "truth")));
        ev.factor = parse_double(fields[4], "truth factor");
        schedule.push_back(ev);
    }
    return schedule;
}

void ingest_csv(const fs::path& csv, const fs::path& out_dir, bool symmetrize_snapshots,
                bool scale_weights) {
    std::ifstream in(csv);
    if (!in) throw std::runtime_error("cannot open " + csv.string());
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("ingest: empty file");
    {
        std::string header = line;
        header.erase(std::remove_if(header.begin(), header.end(),
                                    [](char c) { return c == ' ' || c == '\r'; }),
                     header.end());
        if (header != "t,u,v,w")
            throw std::runtime_error("ingest: expected header 't,u,v,w', got '" + line + "'");
    }
    struct Row {
        std::int64_t t;
        std::uint64_t u, v;
        double w;
    };
    std::vector<Row> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split(line, ',');
        if (fields.size() != 4)
            throw std::runtime_error(csv.string() + ":" + std::to_string(lineno) +
                                     ": expected t,u,v,w");
        Row r;
        r.t = static_cast<std::int64_t>(parse_u64(fields[0], "ingest t"));
        r.u = parse_u64(fields[1], "ingest u");
        r.v = parse_u64(fields[2], "ingest v");
        r.w = parse_double(fields[3], "ingest w");
        rows.push_back(r);
    }
    if (rows.empty()) throw std::runtime_error("ingest: no data rows");

    // remap times to 1..T (order-preserving) and node ids to 0..n-1
    std::map<std::int64_t, int> time_map;
    for (const auto& r : rows) time_map[r.t] = 0;
    int next_t = 1;
    for (auto& [orig, mapped] : time_map) mapped = next_t++;
    std::map<std::uint64_t, NodeId> node_map;
    for (const auto& r : rows) {
        node_map[r.u] = 0;
        node_map[r.v] = 0;
    }
    NodeId next_node = 0;
    for (auto& [orig, mapped] : node_map) mapped = next_node++;

    const int T = static_cast<int>(time_map.size());
    std::vector<Snapshot> snapshots(T);
    for (int t = 1; t <= T; ++t) {
        snapshots[t - 1].t = t;
        snapshots[t - 1].directed = !symmetrize_snapshots;
    }
    for (const auto& r : rows) {
        Snapshot& snap = snapshots[time_map[r.t] - 1];
        snap.edges.push_back({node_map[r.u], node_map[r.v], r.w});
    }
    std::vector<NodeId> universe(node_map.size());
    for (std::uint32_t i = 0; i < universe.size(); ++i) universe[i] = i;
    for (auto& snap : snapshots) {
        snap.nodes = universe;
        if (symmetrize_snapshots) {
            snap.directed = true; // raw rows may carry both directions
            snap = symmetrize(snap);
        } else {
            std::sort(snap.edges.begin(), snap.edges.end(), [](const Edge& a, const Edge& b) {
                return std::make_pair(a.u, a.v) < std::make_pair(b.u, b.v);
            });
        }
    }

    if (scale_weights) {
        double global_max = 0.0;
        for (const auto& snap : snapshots)
            global_max = std::max(global_max, snap.max_weight());
        if (global_max > 0.0)
            for (auto& snap : snapshots)
                for (auto& e : snap.edges) e.w /= global_max;
    }

    DynamicNetwork net;
    net.node_universe = universe;
    net.snapshots = std::move(snapshots);
    write_sequence(out_dir, as_source(net), !symmetrize_snapshots);
    {
        std::ofstream map_out(out_dir / "nodes.tsv");
        for (const auto& [orig, mapped] : node_map) map_out << orig << '\t' << mapped << '\n';
    }
}

} // namespace hcpd
