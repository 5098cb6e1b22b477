#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "socperc/lattice.hpp"
#include "socperc/percolation.hpp"

namespace socperc {

// The decreasing edge coupling: row b of the Bernoulli field X has survival
// probability exp(-1/n^a), and omega(b) keeps an edge open iff every row
// before b let it survive. Rows are never stored; each X value is a
// counter-based draw keyed by (seed, row, edge), so any point of the
// trajectory can be reproduced at random access.
class CouplingState {
public:
    CouplingState(const BoxGeometry& box, double a, std::uint64_t seed);

    const BoxGeometry& box() const { return *box_; }
    std::int64_t row() const { return b_; }       // outer index b
    std::int32_t step() const { return s_; }      // inner index s, 0..r
    const Configuration& config() const { return config_; }
    double survival_probability() const { return survival_; }
    bool done() const { return b_ == box_->vertex_count(); }

    // One lexicographic step: processes edge s+1 of row b (closing it if its
    // X value is 0), or rolls over to the next row when s == r.
    void advance();

    // The underlying Bernoulli field.
    bool x_value(std::int64_t row, EdgeId e) const;

private:
    const BoxGeometry* box_;
    double a_;
    double survival_;
    std::uint64_t seed_;
    std::int64_t b_ = 0;
    std::int32_t s_ = 0;
    Configuration config_;
};

// omega(b0) reconstructed directly from the field.
Configuration coupling_config(const BoxGeometry& box, double a, std::int64_t b0,
                              std::uint64_t seed);

// First row at which each edge draws a zero, capped at n^d.
std::vector<std::int64_t> closure_rows(const BoxGeometry& box, double a, std::uint64_t seed);

struct TrajectoryPoint {
    std::int64_t b;
    std::int64_t value;  // F(omega(b))
};

// b -> F(omega(b)) for b = 0 .. first crossing of the bisector. The value
// sequence is non-increasing, so the crossing is unique; fixed_point records
// whether it is hit exactly (which is the partition-function event).
struct Trajectory {
    std::vector<TrajectoryPoint> points;
    std::int64_t crossing_b = 0;
    bool fixed_point = false;
};

Trajectory coupling_trajectory(const BoxGeometry& box, double a, const FunctionalKind& kind,
                               std::uint64_t seed);

struct ZnEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    std::int64_t replicas = 0;
    std::int64_t fixed_points = 0;
};

// Monte Carlo estimate of Z_n as the probability that the coupling
// trajectory has a fixed point.
ZnEstimate estimate_zn(const BoxGeometry& box, double a, const FunctionalKind& kind,
                       std::int64_t replicas, std::uint64_t seed, int workers = 0);

// First coupling instant at which the relevant smallness condition holds;
// see the per-kind sandwich inequalities in the fields.
struct StoppingRecord {
    FunctionalKind kind;
    std::int64_t b = 0;             // B
    std::int64_t s = 0;             // S
    std::int64_t value_at_stop = 0; // cmax: |Cmax(omega(B,S))|, boundary: largest boundary cluster
    std::optional<std::int64_t> b2, s2;            // boundary only: (B', S')
    std::optional<std::int64_t> value_at_stop2;    // |M_n(omega(B',S'))|
};

StoppingRecord detect_stopping(const BoxGeometry& box, double a, const FunctionalKind& kind,
                               std::uint64_t seed);

struct HappyEventResult {
    bool occurred = false;
    bool check = true;   // occurred implies |Cmax(omega(B+2))| == B+2
    std::int64_t stop_b = 0;
    std::int64_t stop_s = 0;
    std::int64_t cmax_at_stop = 0;
    std::int64_t cmax_after = 0;   // |Cmax(omega(B+2))|
    std::int64_t cut_size = 0;     // |H|
};

// Runs the coupling to (B, S), carves the largest cluster down to B+2
// vertices, and tests whether the field realises exactly that surgery by
// (B+2, 0).
HappyEventResult simulate_happy_event(const BoxGeometry& box, double a, std::uint64_t seed);

}  // namespace socperc
