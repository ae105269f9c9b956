#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "hcpd/generators.hpp"
#include "hcpd/graph.hpp"

namespace hcpd {

// A snapshot sequence the pipeline can stream without holding every snapshot
// in memory; `snapshot(t)` must be valid for t = 1..T and deterministic.
struct SequenceSource {
    int T = 0;
    std::vector<NodeId> universe;
    std::function<Snapshot(int)> snapshot;
};

SequenceSource as_source(const DynamicNetwork& net);           // borrows net
SequenceSource as_source(const GeneratedSequence& generated);  // borrows generated

// On-disk layout: <dir>/manifest.txt with "T=", "directed=", "nodes=" lines,
// plus snapshot_0001.tsv .. snapshot_TTTT.tsv edge lists ("u<TAB>v<TAB>w",
// LF endings). Node ids are 0..nodes-1.
void write_sequence(const std::filesystem::path& dir, const SequenceSource& source,
                    bool directed = false);

struct SequenceManifest {
    int T = 0;
    bool directed = false;
    std::uint32_t nodes = 0;
};

SequenceManifest read_manifest(const std::filesystem::path& dir);

// Streaming reader over the directory layout.
SequenceSource open_sequence(const std::filesystem::path& dir);

// Materializing reader (small inputs and tests).
DynamicNetwork read_sequence(const std::filesystem::path& dir);

// Assignment file: "node<TAB>community" per line.
void write_assignment(const std::filesystem::path& file, const CommunityAssignment& a);
CommunityAssignment read_assignment(const std::filesystem::path& file);

// Ground-truth event list: "t<TAB>scope<TAB>kind<TAB>communities<TAB>factor",
// communities comma-separated ("*" = all).
void write_truth(const std::filesystem::path& file, const EventSchedule& schedule);
EventSchedule read_truth(const std::filesystem::path& file);

// Convert a "t,u,v,w" CSV (header required) into the directory layout.
// Node ids are remapped to 0..n-1 (mapping written to nodes.tsv); time stamps
// are remapped to 1..T preserving order. Optionally symmetrizes each snapshot
// and/or divides every weight by the global maximum so raw volumes fit the
// [0,1] range the edge-monitoring detector expects.
void ingest_csv(const std::filesystem::path& csv, const std::filesystem::path& out_dir,
                bool symmetrize_snapshots, bool scale_weights = false);

std::string format_double(double v); // shortest round-trip decimal form

} // namespace hcpd
