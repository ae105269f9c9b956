#pragma once

#include <cstdint>

#include "hcpd/graph.hpp"

namespace hcpd {

struct PartitionResult {
    CommunityAssignment assignment; // canonical: ids 1..k by size descending
    double modularity = 0.0;
    int levels = 0; // contraction passes performed
};

// Newman modularity Q = sum_ij [A_ij/(2m) - k_i k_j/(2m)^2] delta(c_i, c_j),
// weighted, undirected. Throws on a graph with zero total weight.
double modularity(const Snapshot& g, const CommunityAssignment& assignment);

// Modularity-based agglomeration (local moves + contraction passes) until no
// single move improves Q by more than `tolerance`. Nodes are visited in
// ascending id order and ties broken by the smallest community label, so the
// result is deterministic; `seed` is kept in the signature for detectors that
// randomize visit order but is not consumed by this implementation.
PartitionResult louvain_partition(const Snapshot& g, std::uint64_t seed,
                                  double tolerance = 1e-7);

} // namespace hcpd
