#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "socperc/lattice.hpp"
#include "socperc/rng.hpp"

namespace socperc {

// One bit per edge, in canonical edge order; open_count is kept in sync.
struct Configuration {
    std::vector<std::uint8_t> bits;
    std::int64_t open_count = 0;

    bool open(EdgeId e) const { return bits[static_cast<std::size_t>(e)] != 0; }

    void set(EdgeId e, bool value) {
        std::uint8_t& b = bits[static_cast<std::size_t>(e)];
        open_count += static_cast<int>(value) - static_cast<int>(b);
        b = value ? 1 : 0;
    }

    EdgeId edge_count() const { return static_cast<EdgeId>(bits.size()); }
};

Configuration all_open(const BoxGeometry& box);
Configuration all_closed(const BoxGeometry& box);
Configuration sample_bernoulli(const BoxGeometry& box, double p, RandomStream& rng);

// Connected components of the open subgraph, with the statistics every
// functional needs. Carries a copy of the configuration bits so that the
// diameter functional can run its bounded searches.
struct ClusterAnalysis {
    std::vector<std::int32_t> label;       // cluster id per vertex (root vertex id)
    std::vector<std::int64_t> sizes;       // cluster size multiset (unordered)
    std::int64_t cmax_size = 0;
    std::vector<VertexId> boundary_connected;  // sorted; the set M_n
    std::int64_t cn_size = 0;              // largest cluster touching the boundary
    std::vector<std::uint8_t> open_bits;   // copy of the analysed configuration
};

ClusterAnalysis analyze(const BoxGeometry& box, const Configuration& config);

enum class Functional {
    kCmax,          // size of the largest cluster
    kBoundary,      // number of vertices joined to the box boundary
    kBigClusters,   // vertices lying in clusters of at least ceil(n^b) vertices
    kBigDiameters,  // vertices reaching the boundary shell of their n^b-box
};

struct FunctionalKind {
    Functional which = Functional::kCmax;
    double exponent = 0.0;  // b, for the two big-cluster kinds; in (0, 1)

    static FunctionalKind cmax() { return {Functional::kCmax, 0.0}; }
    static FunctionalKind boundary() { return {Functional::kBoundary, 0.0}; }
    static FunctionalKind big_clusters(double b);
    static FunctionalKind big_diameters(double b);

    bool needs_free_boundary() const { return which != Functional::kCmax; }
    std::string name() const;  // cli token: cmax / boundary / bnb / bnb-diam
};

FunctionalKind parse_functional(const std::string& token, double b);

// ceil(n^b) with a guard against pow landing just above an integer
std::int64_t size_threshold(int side, double exponent);

std::int64_t evaluate_functional(const FunctionalKind& kind, const BoxGeometry& box,
                                 const ClusterAnalysis& analysis);

// phi_n(x) = exp(-x / n^a), the feedback map
double phi_n(double x, int side, double a);

double feedback_p(const FunctionalKind& kind, const BoxGeometry& box,
                  const Configuration& config, double a);

// log of p^o (1-p)^(r-o); -infinity encodes the zero-weight degeneracies
// (p == 1 with a closed edge, p == 0 with an open edge)
double log_weight(const BoxGeometry& box, const Configuration& config, double p);
double log_weight_terms(std::int64_t open_count, std::int64_t edge_count, double p);

// Dump format: header "d n torus r", then the bitstring hex-encoded, four
// edge bits per digit (earlier edges in the high bits of earlier digits).
std::string dump_config(const BoxGeometry& box, const Configuration& config);
std::pair<BoxGeometry, Configuration> parse_config_dump(std::istream& in);

// Whether x is joined by an open path to the boundary shell of its side-m
// offset box, clipped to the lattice box. Any such path has a prefix inside
// the offset box, so the search never leaves it. An optional edge override
// lets callers probe a proposed flip without touching the configuration.
struct ReachScratch {
    std::vector<std::int32_t> seen;
    std::vector<VertexId> queue;
    std::vector<int> base, probe;
    std::int32_t stamp = 0;
};

bool shell_reach_probe(const BoxGeometry& box, const std::vector<std::uint8_t>& open_bits,
                       std::int64_t m, VertexId x, EdgeId override_edge, bool override_open,
                       ReachScratch& scratch);

std::vector<std::uint8_t> shell_reach_flags(const BoxGeometry& box,
                                            const std::vector<std::uint8_t>& open_bits,
                                            std::int64_t m);

}  // namespace socperc
