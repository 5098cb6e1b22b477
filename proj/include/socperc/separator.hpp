#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "socperc/lattice.hpp"
#include "socperc/percolation.hpp"

namespace socperc {

// A finite subgraph of the Z^d lattice: explicit vertex coordinates plus
// unit-step edges between members. Connectivity is not part of the type;
// carve checks it, bisect accepts anything.
struct LatticeSubgraph {
    int dim = 0;
    std::vector<int> coords;                                   // |V| * dim, row per vertex
    std::vector<std::pair<std::int32_t, std::int32_t>> edges;  // vertex index pairs

    std::int32_t vertex_count() const { return static_cast<std::int32_t>(coords.size() / static_cast<std::size_t>(dim)); }
    const int* vertex(std::int32_t i) const { return coords.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(dim); }
};

// Remove few edges so that every component keeps at most ceil(|V|/2)
// vertices. The cut size is O(|V|^((d-1)/d)) with the constant 4^(d+1) d^2.
std::vector<std::int32_t> bisect(const LatticeSubgraph& g);

// Remove few edges so that the component of x keeps exactly m vertices.
// Requires a connected graph; the cut size constant picks up the factor
// 1 / (1 - 2^-(d-1)/d) from the halving recursion.
std::vector<std::int32_t> carve(const LatticeSubgraph& g, std::int32_t x, std::int64_t m);

// Order the edges of a cut so that each one is incident to the component of
// x grown by reopening the previous ones; the component chain is nested and
// ends at the whole vertex set.
std::vector<std::int32_t> surgeon_reopen_order(const LatticeSubgraph& g,
                                               const std::vector<std::int32_t>& cut,
                                               std::int32_t x);

// Worst-case cut bounds used by callers and tests.
double bisect_cut_bound(int dim, std::int64_t vertex_count);
double carve_cut_bound(int dim, std::int64_t vertex_count);

// The open cluster of `root` as a standalone subgraph, with maps back to box
// vertex and edge ids.
struct ClusterSubgraph {
    LatticeSubgraph graph;
    std::vector<VertexId> vertex_ids;  // subgraph index -> box vertex
    std::vector<EdgeId> edge_ids;      // subgraph edge index -> box edge
};

ClusterSubgraph cluster_subgraph(const BoxGeometry& box, const ClusterAnalysis& analysis,
                                 VertexId root);

}  // namespace socperc
