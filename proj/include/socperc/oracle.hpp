#pragma once

#include <cstdint>
#include <vector>

#include "socperc/percolation.hpp"

namespace socperc {

inline constexpr int kEnumerationHardCap = 30;

struct EnumerationOptions {
    int max_edges = 24;        // 2^r enumeration cap
    bool allow_over_cap = false;
    int workers = 0;           // 0: serial
    int dense_weights_max_edges = 16;  // keep per-config weights up to this r
};

// Exact law of the feedback measure on a small box. law_of_F is indexed by
// the functional value (0 .. n^d); law_of_p pairs each value's feedback
// probability with its mass. zn and zn_grouped are the same sum accumulated
// two ways and must agree.
struct ExactMeasure {
    double zn = 0.0;
    double zn_grouped = 0.0;
    std::vector<double> law_of_F;
    std::vector<std::pair<double, double>> law_of_p;
    std::vector<double> per_config_weights;  // empty above the dense cap
    double mean_p = 0.0;                     // expectation of p_n under the measure
};

ExactMeasure enumerate_measure(const BoxGeometry& box, const FunctionalKind& kind, double a,
                               const EnumerationOptions& opts = {});

// Exact distribution of the functional under the Bernoulli product measure.
std::vector<double> exact_pp_pushforward(const BoxGeometry& box, const FunctionalKind& kind,
                                         double p, const EnumerationOptions& opts = {});

// Exact expectation of the functional under the product measure; convenience
// over the pushforward.
double exact_pp_mean(const BoxGeometry& box, const FunctionalKind& kind, double p,
                     const EnumerationOptions& opts = {});

struct MonteCarloEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    std::int64_t samples = 0;
};

// Unbiased importance-sampling estimate of the partition function with a
// Bernoulli(q) proposal; weight ratios are formed in log space.
MonteCarloEstimate importance_zn(const BoxGeometry& box, const FunctionalKind& kind, double a,
                                 double q, std::int64_t samples, std::uint64_t seed);

}  // namespace socperc
