#include "socperc/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace socperc {

namespace {

bool is_cluster_kind(const FunctionalKind& kind) {
    return kind.which != Functional::kBigDiameters;
}

}  // namespace

MarkovChain::MarkovChain(const BoxGeometry& box, const FunctionalKind& kind, double a,
                         std::uint64_t seed, const ChainOptions& opts)
    : box_(&box), kind_(kind), a_(a), mode_(opts.mode), rng_(seed) {
    if (kind.needs_free_boundary() && box.torus())
        throw std::invalid_argument("functional '" + kind.name() + "' requires a free-boundary box");
    if (!(a > 0.0)) throw std::invalid_argument("feedback exponent must be positive");

    config_ = opts.cold_start ? all_closed(box) : all_open(box);
    if (kind.which == Functional::kBigClusters || kind.which == Functional::kBigDiameters)
        threshold_ = size_threshold(box.side(), kind.exponent);

    init_clusters();
    p_ = phi_n(static_cast<double>(f_), box.side(), a_);
    log_w_ = log_weight_terms(config_.open_count, box.edge_count(), p_);
    if (!std::isfinite(log_w_))
        throw std::invalid_argument("start configuration has zero weight for functional '" +
                                    kind.name() + "'");
}

void MarkovChain::init_clusters() {
    const ClusterAnalysis analysis = analyze(*box_, config_);
    if (mode_ == ChainMode::kIncremental && is_cluster_kind(kind_)) {
        clusters_.clear();
        free_ids_.clear();
        size_hist_.clear();
        cluster_of_.assign(static_cast<std::size_t>(box_->vertex_count()), -1);
        std::vector<std::int32_t> id_of_label(static_cast<std::size_t>(box_->vertex_count()), -1);
        for (VertexId v = 0; v < box_->vertex_count(); ++v) {
            const std::int32_t label = analysis.label[static_cast<std::size_t>(v)];
            std::int32_t& id = id_of_label[static_cast<std::size_t>(label)];
            if (id < 0) {
                id = static_cast<std::int32_t>(clusters_.size());
                clusters_.push_back({});
            }
            cluster_of_[static_cast<std::size_t>(v)] = id;
            ++clusters_[static_cast<std::size_t>(id)].size;
            if (box_->is_boundary(v)) ++clusters_[static_cast<std::size_t>(id)].boundary;
        }
        mn_total_ = 0;
        bnb_total_ = 0;
        for (const ClusterInfo& c : clusters_) {
            hist_add(c.size);
            if (c.boundary > 0) mn_total_ += c.size;
            bnb_total_ += bnb_contrib(c.size);
        }
        visit_a_.assign(static_cast<std::size_t>(box_->vertex_count()), 0);
        visit_b_.assign(static_cast<std::size_t>(box_->vertex_count()), 0);
        probe_stamp_ = 0;
    }
    if (mode_ == ChainMode::kIncremental && kind_.which == Functional::kBigDiameters) {
        reach_ = shell_reach_flags(*box_, config_.bits, threshold_);
        reach_total_ = 0;
        for (std::uint8_t r : reach_) reach_total_ += r;
    }
    f_ = evaluate_functional(kind_, *box_, analysis);
}

void MarkovChain::hist_remove(std::int64_t size) {
    auto it = size_hist_.find(size);
    if (--it->second == 0) size_hist_.erase(it);
}

void MarkovChain::hist_add(std::int64_t size) { ++size_hist_[size]; }

std::int32_t MarkovChain::alloc_cluster() {
    if (!free_ids_.empty()) {
        const std::int32_t id = free_ids_.back();
        free_ids_.pop_back();
        clusters_[static_cast<std::size_t>(id)] = {};
        return id;
    }
    clusters_.push_back({});
    return static_cast<std::int32_t>(clusters_.size() - 1);
}

// Alternating search from both endpoints of an open edge with the edge
// removed. Whichever side exhausts first is a complete component; meeting
// the other side proves the cluster stays connected.
void MarkovChain::probe_split(EdgeId e, SplitProbe& out) {
    out.disconnects = false;
    out.side.clear();
    out.side_size = 0;
    out.side_boundary = 0;

    const Edge& ed = box_->edge(e);
    const std::int32_t stamp = ++probe_stamp_;
    queue_a_.clear();
    queue_b_.clear();
    queue_a_.push_back(ed.u);
    queue_b_.push_back(ed.v);
    visit_a_[static_cast<std::size_t>(ed.u)] = stamp;
    visit_b_[static_cast<std::size_t>(ed.v)] = stamp;
    std::size_t head_a = 0, head_b = 0;

    while (true) {
        // side A expands one vertex
        if (head_a == queue_a_.size()) {
            out.disconnects = true;
            out.side = queue_a_;
            break;
        }
        {
            const VertexId v = queue_a_[head_a++];
            for (EdgeId inc : box_->incident(v)) {
                if (inc == e || !config_.open(inc)) continue;
                const VertexId w = box_->other_end(inc, v);
                if (visit_b_[static_cast<std::size_t>(w)] == stamp) return;  // still connected
                if (visit_a_[static_cast<std::size_t>(w)] == stamp) continue;
                visit_a_[static_cast<std::size_t>(w)] = stamp;
                queue_a_.push_back(w);
            }
        }
        // side B expands one vertex
        if (head_b == queue_b_.size()) {
            out.disconnects = true;
            out.side = queue_b_;
            break;
        }
        {
            const VertexId v = queue_b_[head_b++];
            for (EdgeId inc : box_->incident(v)) {
                if (inc == e || !config_.open(inc)) continue;
                const VertexId w = box_->other_end(inc, v);
                if (visit_a_[static_cast<std::size_t>(w)] == stamp) return;  // still connected
                if (visit_b_[static_cast<std::size_t>(w)] == stamp) continue;
                visit_b_[static_cast<std::size_t>(w)] = stamp;
                queue_b_.push_back(w);
            }
        }
    }

    out.side_size = static_cast<std::int64_t>(out.side.size());
    for (VertexId v : out.side)
        if (box_->is_boundary(v)) ++out.side_boundary;
}

std::int64_t MarkovChain::propose_f(EdgeId e, bool opening, SplitProbe& probe,
                                    std::vector<std::pair<VertexId, std::uint8_t>>& reach_delta) {
    if (kind_.which == Functional::kBigDiameters) {
        // affected vertices are those whose offset box contains both ends
        reach_delta.clear();
        const Edge& ed = box_->edge(e);
        const int d = box_->dim();
        const int lo_off = -static_cast<int>(threshold_ / 2);
        const int hi_off = static_cast<int>((threshold_ - 1) / 2);
        std::vector<int> cu(static_cast<std::size_t>(d)), cv(static_cast<std::size_t>(d));
        std::vector<int> lo(static_cast<std::size_t>(d)), hi(static_cast<std::size_t>(d));
        box_->coords(ed.u, cu.data());
        box_->coords(ed.v, cv.data());
        for (int i = 0; i < d; ++i) {
            lo[static_cast<std::size_t>(i)] =
                std::max({cu[static_cast<std::size_t>(i)] - hi_off,
                          cv[static_cast<std::size_t>(i)] - hi_off, box_->coord_lo()});
            hi[static_cast<std::size_t>(i)] =
                std::min({cu[static_cast<std::size_t>(i)] - lo_off,
                          cv[static_cast<std::size_t>(i)] - lo_off, box_->coord_hi()});
        }
        std::int64_t delta = 0;
        std::vector<int> pos(lo.begin(), lo.end());
        while (true) {
            const VertexId x = box_->vertex_at(pos.data());
            const bool now = shell_reach_probe(*box_, config_.bits, threshold_, x, e, opening,
                                               reach_scratch_);
            if (now != (reach_[static_cast<std::size_t>(x)] != 0)) {
                reach_delta.emplace_back(x, now ? 1 : 0);
                delta += now ? 1 : -1;
            }
            int axis = d - 1;
            while (axis >= 0 && ++pos[static_cast<std::size_t>(axis)] > hi[static_cast<std::size_t>(axis)]) {
                pos[static_cast<std::size_t>(axis)] = lo[static_cast<std::size_t>(axis)];
                --axis;
            }
            if (axis < 0) break;
        }
        return reach_total_ + delta;
    }

    const Edge& ed = box_->edge(e);
    if (opening) {
        const std::int32_t ca = cluster_of_[static_cast<std::size_t>(ed.u)];
        const std::int32_t cb = cluster_of_[static_cast<std::size_t>(ed.v)];
        if (ca == cb) return f_;
        const ClusterInfo& a = clusters_[static_cast<std::size_t>(ca)];
        const ClusterInfo& b = clusters_[static_cast<std::size_t>(cb)];
        switch (kind_.which) {
            case Functional::kCmax:
                return std::max(f_, a.size + b.size);
            case Functional::kBoundary: {
                std::int64_t mn = mn_total_;
                if (a.boundary > 0 && b.boundary == 0) mn += b.size;
                if (a.boundary == 0 && b.boundary > 0) mn += a.size;
                return mn;
            }
            case Functional::kBigClusters:
                return bnb_total_ - bnb_contrib(a.size) - bnb_contrib(b.size) +
                       bnb_contrib(a.size + b.size);
            default:
                break;
        }
        throw std::logic_error("unreachable");
    }

    probe_split(e, probe);
    if (!probe.disconnects) return f_;

    const std::int32_t cid = cluster_of_[static_cast<std::size_t>(ed.u)];
    const ClusterInfo& whole = clusters_[static_cast<std::size_t>(cid)];
    const std::int64_t rest_size = whole.size - probe.side_size;
    const std::int32_t rest_boundary = whole.boundary - probe.side_boundary;
    switch (kind_.which) {
        case Functional::kCmax: {
            if (whole.size < f_) return f_;
            // splitting a maximal cluster: largest of the two halves against
            // the runner-up in the size histogram
            auto it = size_hist_.find(whole.size);
            std::int64_t best = std::max(probe.side_size, rest_size);
            if (it->second >= 2) return whole.size;
            if (it != size_hist_.begin()) best = std::max(best, std::prev(it)->first);
            return best;
        }
        case Functional::kBoundary: {
            if (whole.boundary == 0) return mn_total_;
            std::int64_t mn = mn_total_;
            if (probe.side_boundary == 0) mn -= probe.side_size;
            if (rest_boundary == 0) mn -= rest_size;
            return mn;
        }
        case Functional::kBigClusters:
            return bnb_total_ - bnb_contrib(whole.size) + bnb_contrib(probe.side_size) +
                   bnb_contrib(rest_size);
        default:
            break;
    }
    throw std::logic_error("unreachable");
}

void MarkovChain::commit(EdgeId e, bool opening, const SplitProbe& probe,
                         const std::vector<std::pair<VertexId, std::uint8_t>>& reach_delta) {
    const Edge& ed = box_->edge(e);

    if (kind_.which == Functional::kBigDiameters) {
        config_.set(e, opening);
        for (const auto& [v, flag] : reach_delta) {
            reach_total_ += flag ? 1 : -1;
            reach_[static_cast<std::size_t>(v)] = flag;
        }
        return;
    }

    if (opening) {
        const std::int32_t ca = cluster_of_[static_cast<std::size_t>(ed.u)];
        const std::int32_t cb = cluster_of_[static_cast<std::size_t>(ed.v)];
        if (ca != cb) {
            // relabel the smaller component while the edge is still closed
            std::int32_t small = ca, big = cb;
            VertexId small_end = ed.u;
            if (clusters_[static_cast<std::size_t>(small)].size >
                clusters_[static_cast<std::size_t>(big)].size) {
                std::swap(small, big);
                small_end = ed.v;
            }
            queue_a_.clear();
            queue_a_.push_back(small_end);
            const std::int32_t stamp = ++probe_stamp_;
            visit_a_[static_cast<std::size_t>(small_end)] = stamp;
            for (std::size_t head = 0; head < queue_a_.size(); ++head) {
                const VertexId v = queue_a_[head];
                cluster_of_[static_cast<std::size_t>(v)] = big;
                for (EdgeId inc : box_->incident(v)) {
                    if (!config_.open(inc)) continue;
                    const VertexId w = box_->other_end(inc, v);
                    if (visit_a_[static_cast<std::size_t>(w)] == stamp) continue;
                    visit_a_[static_cast<std::size_t>(w)] = stamp;
                    queue_a_.push_back(w);
                }
            }
            ClusterInfo& cbig = clusters_[static_cast<std::size_t>(big)];
            ClusterInfo& csmall = clusters_[static_cast<std::size_t>(small)];
            hist_remove(cbig.size);
            hist_remove(csmall.size);
            if (cbig.boundary > 0 && csmall.boundary == 0) mn_total_ += csmall.size;
            if (cbig.boundary == 0 && csmall.boundary > 0) mn_total_ += cbig.size;
            bnb_total_ += bnb_contrib(cbig.size + csmall.size) - bnb_contrib(cbig.size) -
                          bnb_contrib(csmall.size);
            cbig.size += csmall.size;
            cbig.boundary += csmall.boundary;
            hist_add(cbig.size);
            csmall = {};
            free_ids_.push_back(small);
        }
        config_.set(e, true);
        return;
    }

    config_.set(e, false);
    if (!probe.disconnects) return;

    const std::int32_t old_id = cluster_of_[static_cast<std::size_t>(probe.side.front())];
    const std::int32_t new_id = alloc_cluster();  // may grow the vector
    ClusterInfo& old_cluster = clusters_[static_cast<std::size_t>(old_id)];
    ClusterInfo& fresh = clusters_[static_cast<std::size_t>(new_id)];
    for (VertexId v : probe.side) cluster_of_[static_cast<std::size_t>(v)] = new_id;
    fresh.size = probe.side_size;
    fresh.boundary = probe.side_boundary;

    hist_remove(old_cluster.size);
    bnb_total_ += bnb_contrib(probe.side_size) + bnb_contrib(old_cluster.size - probe.side_size) -
                  bnb_contrib(old_cluster.size);
    if (old_cluster.boundary > 0) {
        if (fresh.boundary == 0) mn_total_ -= fresh.size;
        if (old_cluster.boundary - fresh.boundary == 0)
            mn_total_ -= old_cluster.size - fresh.size;
    }
    old_cluster.size -= fresh.size;
    old_cluster.boundary -= fresh.boundary;
    hist_add(old_cluster.size);
    hist_add(fresh.size);
}

bool MarkovChain::step() {
    ++proposals_;
    const EdgeId e = static_cast<EdgeId>(rng_.next_below(static_cast<std::uint64_t>(box_->edge_count())));
    const double u = rng_.next_unit();
    const bool opening = !config_.open(e);

    std::int64_t f_new = 0;
    SplitProbe probe;
    std::vector<std::pair<VertexId, std::uint8_t>> reach_delta;

    if (mode_ == ChainMode::kFullRecompute) {
        config_.set(e, opening);
        f_new = evaluate_functional(kind_, *box_, analyze(*box_, config_));
        config_.set(e, !opening);
    } else {
        f_new = propose_f(e, opening, probe, reach_delta);
    }

    const std::int64_t o_new = config_.open_count + (opening ? 1 : -1);
    const double p_new = phi_n(static_cast<double>(f_new), box_->side(), a_);
    const double lw_new = log_weight_terms(o_new, box_->edge_count(), p_new);
    if (!std::isfinite(lw_new)) return false;  // zero-weight proposals never accepted
    if (!(u < std::exp(lw_new - log_w_))) return false;

    if (mode_ == ChainMode::kFullRecompute)
        config_.set(e, opening);
    else
        commit(e, opening, probe, reach_delta);
    f_ = f_new;
    p_ = p_new;
    log_w_ = lw_new;
    ++accepts_;
    return true;
}

void MarkovChain::sweep() {
    for (EdgeId i = 0; i < box_->edge_count(); ++i) step();
    ++sweeps_;
}

std::vector<ChainSample> MarkovChain::run(std::int64_t sweeps, std::int64_t burn_in,
                                          std::int64_t thin) {
    if (burn_in < 0 || sweeps <= burn_in) throw std::invalid_argument("need sweeps > burn_in >= 0");
    if (thin < 1) throw std::invalid_argument("thinning interval must be >= 1");
    std::vector<ChainSample> samples;
    samples.reserve(static_cast<std::size_t>((sweeps - burn_in) / thin));
    for (std::int64_t sw = 1; sw <= sweeps; ++sw) {
        sweep();
        if (sw > burn_in && (sw - burn_in) % thin == 0) samples.push_back({f_, p_});
    }
    return samples;
}

bool MarkovChain::coherent() const {
    const ClusterAnalysis fresh = analyze(*box_, config_);
    const std::int64_t f = evaluate_functional(kind_, *box_, fresh);
    if (f != f_) return false;
    const double p = phi_n(static_cast<double>(f), box_->side(), a_);
    const double lw = log_weight_terms(config_.open_count, box_->edge_count(), p);
    if (lw != log_w_ || p != p_) return false;
    if (mode_ == ChainMode::kIncremental && is_cluster_kind(kind_)) {
        // the incremental partition must match the fresh labels
        std::vector<std::int32_t> fwd(clusters_.size(), -1);
        std::vector<std::int32_t> bwd(static_cast<std::size_t>(box_->vertex_count()), -1);
        for (VertexId v = 0; v < box_->vertex_count(); ++v) {
            const std::int32_t mine = cluster_of_[static_cast<std::size_t>(v)];
            const std::int32_t theirs = fresh.label[static_cast<std::size_t>(v)];
            if (fwd[static_cast<std::size_t>(mine)] < 0) fwd[static_cast<std::size_t>(mine)] = theirs;
            if (bwd[static_cast<std::size_t>(theirs)] < 0) bwd[static_cast<std::size_t>(theirs)] = mine;
            if (fwd[static_cast<std::size_t>(mine)] != theirs ||
                bwd[static_cast<std::size_t>(theirs)] != mine)
                return false;
        }
    }
    return true;
}

bool recompute_modes_agree(const BoxGeometry& box, const FunctionalKind& kind, double a,
                           std::uint64_t seed, std::int64_t flips, const ChainOptions& opts) {
    ChainOptions inc = opts;
    inc.mode = ChainMode::kIncremental;
    ChainOptions ref = opts;
    ref.mode = ChainMode::kFullRecompute;
    MarkovChain fast(box, kind, a, seed, inc);
    MarkovChain slow(box, kind, a, seed, ref);
    for (std::int64_t i = 0; i < flips; ++i) {
        const bool acc_fast = fast.step();
        const bool acc_slow = slow.step();
        if (acc_fast != acc_slow || fast.f_value() != slow.f_value() ||
            fast.log_w() != slow.log_w() ||
            fast.config().open_count != slow.config().open_count)
            return false;
    }
    return fast.config().bits == slow.config().bits;
}

}  // namespace socperc
