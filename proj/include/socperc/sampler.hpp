#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "socperc/percolation.hpp"
#include "socperc/rng.hpp"

namespace socperc {

struct ChainSample {
    std::int64_t f;
    double p;
};

enum class ChainMode {
    kIncremental,    // local cluster surgery per flip
    kFullRecompute,  // fresh analysis per proposal; the reference path
};

struct ChainOptions {
    ChainMode mode = ChainMode::kIncremental;
    bool cold_start = false;  // start all-closed instead of all-open
};

// Single-edge-flip Metropolis chain targeting the feedback measure. The
// cached functional value and log-weight stay coherent with the
// configuration after every step, and the chain never occupies a state of
// zero weight. Deterministic given the seed; one instance is strictly
// sequential.
class MarkovChain {
public:
    MarkovChain(const BoxGeometry& box, const FunctionalKind& kind, double a,
                std::uint64_t seed, const ChainOptions& opts = {});

    bool step();   // one uniform edge proposal; true when accepted
    void sweep();  // r proposals

    // Samples (F, p_n) recorded every `thin` sweeps once past burn-in.
    std::vector<ChainSample> run(std::int64_t sweeps, std::int64_t burn_in, std::int64_t thin);

    const BoxGeometry& box() const { return *box_; }
    const FunctionalKind& kind() const { return kind_; }
    const Configuration& config() const { return config_; }
    std::int64_t f_value() const { return f_; }
    double p_value() const { return p_; }
    double log_w() const { return log_w_; }
    std::int64_t proposals() const { return proposals_; }
    std::int64_t accepts() const { return accepts_; }
    std::int64_t sweeps_done() const { return sweeps_; }

    // Recomputes everything from scratch and compares with the caches.
    bool coherent() const;

private:
    struct ClusterInfo {
        std::int64_t size = 0;
        std::int32_t boundary = 0;
    };

    struct SplitProbe {
        bool disconnects = false;
        std::vector<VertexId> side;  // complete component of one endpoint
        std::int64_t side_size = 0;
        std::int32_t side_boundary = 0;
    };

    void init_clusters();
    std::int64_t propose_f(EdgeId e, bool opening, SplitProbe& probe,
                           std::vector<std::pair<VertexId, std::uint8_t>>& reach_delta);
    void commit(EdgeId e, bool opening, const SplitProbe& probe,
                const std::vector<std::pair<VertexId, std::uint8_t>>& reach_delta);
    void probe_split(EdgeId e, SplitProbe& out);
    std::int64_t bnb_contrib(std::int64_t size) const {
        return size >= threshold_ ? size : 0;
    }
    void hist_remove(std::int64_t size);
    void hist_add(std::int64_t size);
    std::int32_t alloc_cluster();

    const BoxGeometry* box_;
    FunctionalKind kind_;
    double a_;
    ChainMode mode_;
    RandomStream rng_;
    Configuration config_;

    std::int64_t f_ = 0;
    double p_ = 0.0;
    double log_w_ = 0.0;
    std::int64_t proposals_ = 0;
    std::int64_t accepts_ = 0;
    std::int64_t sweeps_ = 0;

    // incremental bookkeeping (cluster kinds)
    std::vector<std::int32_t> cluster_of_;
    std::vector<ClusterInfo> clusters_;
    std::vector<std::int32_t> free_ids_;
    std::map<std::int64_t, std::int32_t> size_hist_;  // size -> number of clusters
    std::int64_t mn_total_ = 0;
    std::int64_t bnb_total_ = 0;
    std::int64_t threshold_ = 0;

    // incremental bookkeeping (reach kind)
    std::vector<std::uint8_t> reach_;
    std::int64_t reach_total_ = 0;
    ReachScratch reach_scratch_;

    // split-probe scratch
    std::vector<std::int32_t> visit_a_, visit_b_;
    std::int32_t probe_stamp_ = 0;
    std::vector<VertexId> queue_a_, queue_b_;
};

// Replays one proposal stream through the incremental and the full-recompute
// paths and checks that functional values, log-weights and accept decisions
// agree at every step.
bool recompute_modes_agree(const BoxGeometry& box, const FunctionalKind& kind, double a,
                           std::uint64_t seed, std::int64_t flips,
                           const ChainOptions& opts = {});

}  // namespace socperc
