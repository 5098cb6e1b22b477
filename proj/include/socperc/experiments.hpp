#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "socperc/oracle.hpp"
#include "socperc/percolation.hpp"
#include "socperc/sampler.hpp"

namespace socperc {

// Worker count resolution: explicit value, else the SOCPERC_WORKERS
// environment variable, else the hardware concurrency.
int resolve_workers(int requested);

struct ExperimentConfig {
    int dim = 2;
    std::vector<int> n_list;
    FunctionalKind kind = FunctionalKind::cmax();
    double a = 1.5;
    bool torus = false;

    std::int64_t chains = 4;
    std::int64_t sweeps = 2000;
    std::int64_t burn_in = 500;
    std::int64_t thin = 1;
    std::uint64_t seed = 1;
    bool cold_start = false;

    double p_ref = 0.5;  // reference critical point; exact for d = 2 bonds
    std::vector<double> epsilon_list = {0.20, 0.10, 0.05, 0.02};

    double c = 0.0;            // deviation scaling exponent (speed study)
    double beta_prime = 0.15;  // supercritical exponent hypothesis
    double gamma_prime = 2.5;  // subcritical exponent hypothesis

    int workers = 0;
};

// Enforce the admissibility window of the functional; messages cite the
// violated inequality.
void validate_parameter_window(const ExperimentConfig& cfg);
void validate_speed_window(const ExperimentConfig& cfg);

struct ChainSummary {
    std::int64_t chain_id = 0;
    double mean_p = 0.0;
    std::int64_t samples = 0;
};

struct ConcentrationRow {
    int n = 0;
    std::int64_t pooled_samples = 0;
    double mean_p = 0.0;
    double q05 = 0.0, q25 = 0.0, q50 = 0.0, q75 = 0.0, q95 = 0.0;
    double mean_f = 0.0;
    std::vector<double> tail_probs;  // P(|p_n - p_ref| >= eps) per epsilon
    std::vector<ChainSummary> per_chain;
    double chain_spread = 0.0;  // max - min of per-chain means
};

std::vector<ConcentrationRow> concentration_study(const ExperimentConfig& cfg);

struct SpeedRow {
    int n = 0;
    std::int64_t pooled_samples = 0;
    double q05 = 0.0, q25 = 0.0, q50 = 0.0, q75 = 0.0, q95 = 0.0;  // of n^c (p_n - p_ref)
    double median_abs = 0.0;
};

std::vector<SpeedRow> speed_study(const ExperimentConfig& cfg);

struct QnResult {
    double qn = 0.0;
    int evaluations = 0;
    std::int64_t samples_used = 0;
    bool exact = false;
};

// Fixed point of p -> phi_n(E_p[F]) by bisection; Monte Carlo estimates of
// the mean double their sample budget whenever they break monotonicity.
QnResult qn_fixed_point(const BoxGeometry& box, double a, double b, std::int64_t mc_samples,
                        double tol, std::uint64_t seed, bool use_exact = false);

struct TailRow {
    int n = 0;
    std::int64_t hits = 0;
    std::int64_t samples = 0;
    double estimate = 0.0;
};

struct TailResult {
    std::vector<TailRow> rows;
    bool upper_tail = false;  // P(F > A n^a) in the subcritical direction
    bool strictly_decreasing = false;
};

TailResult tail_decay_check(int dim, const FunctionalKind& kind, double p, double a, double A,
                            const std::vector<int>& n_list, std::int64_t samples,
                            std::uint64_t seed, double p_ref = 0.5, int workers = 0);

}  // namespace socperc
