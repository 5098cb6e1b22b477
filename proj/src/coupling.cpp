#include "socperc/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "socperc/separator.hpp"

namespace socperc {

namespace {

double row_survival(const BoxGeometry& box, double a) {
    if (!(a > 0.0)) throw std::invalid_argument("feedback exponent must be positive");
    return std::exp(-1.0 / std::pow(static_cast<double>(box.side()), a));
}

}  // namespace

CouplingState::CouplingState(const BoxGeometry& box, double a, std::uint64_t seed)
    : box_(&box), a_(a), survival_(row_survival(box, a)), seed_(seed),
      config_(all_open(box)) {}

bool CouplingState::x_value(std::int64_t row, EdgeId e) const {
    return keyed_unit(seed_, static_cast<std::uint64_t>(row), static_cast<std::uint64_t>(e)) <
           survival_;
}

void CouplingState::advance() {
    if (done()) throw std::logic_error("coupling already ran past its last row");
    if (s_ < box_->edge_count()) {
        const EdgeId e = s_;  // edge e_{s+1} in 1-based step terms
        if (config_.open(e) && !x_value(b_, e)) config_.set(e, false);
        ++s_;
    } else {
        ++b_;
        s_ = 0;
    }
}

Configuration coupling_config(const BoxGeometry& box, double a, std::int64_t b0,
                              std::uint64_t seed) {
    if (b0 < 0 || b0 > box.vertex_count())
        throw std::invalid_argument("coupling row out of range");
    const double survival = row_survival(box, a);
    Configuration config = all_open(box);
    for (EdgeId e = 0; e < box.edge_count(); ++e)
        for (std::int64_t b = 0; b < b0; ++b)
            if (!(keyed_unit(seed, static_cast<std::uint64_t>(b), static_cast<std::uint64_t>(e)) <
                  survival)) {
                config.set(e, false);
                break;
            }
    return config;
}

std::vector<std::int64_t> closure_rows(const BoxGeometry& box, double a, std::uint64_t seed) {
    const double survival = row_survival(box, a);
    const std::int64_t nd = box.vertex_count();
    std::vector<std::int64_t> rows(static_cast<std::size_t>(box.edge_count()), nd);
    for (EdgeId e = 0; e < box.edge_count(); ++e)
        for (std::int64_t b = 0; b < nd; ++b)
            if (!(keyed_unit(seed, static_cast<std::uint64_t>(b), static_cast<std::uint64_t>(e)) <
                  survival)) {
                rows[static_cast<std::size_t>(e)] = b;
                break;
            }
    return rows;
}

namespace {

// Insert-only cluster bookkeeping for the backward sweep of a trajectory.
struct GrowingClusters {
    std::vector<std::int32_t> parent;
    std::vector<std::int64_t> size;
    std::vector<std::uint8_t> boundary;
    std::int64_t cmax = 1;
    std::int64_t boundary_total = 0;

    GrowingClusters(const BoxGeometry& box)
        : parent(static_cast<std::size_t>(box.vertex_count())),
          size(static_cast<std::size_t>(box.vertex_count()), 1),
          boundary(static_cast<std::size_t>(box.vertex_count()), 0) {
        std::iota(parent.begin(), parent.end(), 0);
        for (VertexId v : box.boundary()) boundary[static_cast<std::size_t>(v)] = 1;
        boundary_total = static_cast<std::int64_t>(box.boundary().size());
    }

    std::int32_t find(std::int32_t v) {
        std::int32_t root = v;
        while (parent[static_cast<std::size_t>(root)] != root) root = parent[static_cast<std::size_t>(root)];
        while (parent[static_cast<std::size_t>(v)] != root) {
            const std::int32_t next = parent[static_cast<std::size_t>(v)];
            parent[static_cast<std::size_t>(v)] = root;
            v = next;
        }
        return root;
    }

    void unite(std::int32_t u, std::int32_t v) {
        std::int32_t a = find(u), b = find(v);
        if (a == b) return;
        if (size[static_cast<std::size_t>(a)] < size[static_cast<std::size_t>(b)]) std::swap(a, b);
        const bool ba = boundary[static_cast<std::size_t>(a)] != 0;
        const bool bb = boundary[static_cast<std::size_t>(b)] != 0;
        if (ba && !bb) boundary_total += size[static_cast<std::size_t>(b)];
        if (!ba && bb) boundary_total += size[static_cast<std::size_t>(a)];
        parent[static_cast<std::size_t>(b)] = a;
        size[static_cast<std::size_t>(a)] += size[static_cast<std::size_t>(b)];
        boundary[static_cast<std::size_t>(a)] = (ba || bb) ? 1 : 0;
        cmax = std::max(cmax, size[static_cast<std::size_t>(a)]);
    }
};

}  // namespace

Trajectory coupling_trajectory(const BoxGeometry& box, double a, const FunctionalKind& kind,
                               std::uint64_t seed) {
    if (kind.which != Functional::kCmax && kind.which != Functional::kBoundary)
        throw std::invalid_argument("trajectories are defined for the cmax and boundary functionals");
    if (kind.which == Functional::kBoundary && box.torus())
        throw std::invalid_argument("boundary functional requires a free-boundary box");

    const std::int64_t nd = box.vertex_count();
    std::vector<std::int64_t> rows = closure_rows(box, a, seed);
    std::vector<EdgeId> order(static_cast<std::size_t>(box.edge_count()));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](EdgeId x, EdgeId y) {
        return rows[static_cast<std::size_t>(x)] > rows[static_cast<std::size_t>(y)];
    });

    // omega(b) = edges whose closure row is >= b, so one backward sweep over
    // b with insert-only unions yields every value of the trajectory
    std::vector<std::int64_t> values(static_cast<std::size_t>(nd) + 1, 0);
    GrowingClusters clusters(box);
    std::size_t next = 0;
    for (std::int64_t b = nd; b >= 0; --b) {
        while (next < order.size() && rows[static_cast<std::size_t>(order[next])] >= b) {
            const Edge& ed = box.edge(order[next]);
            clusters.unite(ed.u, ed.v);
            ++next;
        }
        values[static_cast<std::size_t>(b)] =
            kind.which == Functional::kCmax ? clusters.cmax : clusters.boundary_total;
    }

    Trajectory out;
    for (std::int64_t b = 0; b <= nd; ++b) {
        out.points.push_back({b, values[static_cast<std::size_t>(b)]});
        if (values[static_cast<std::size_t>(b)] <= b) {
            out.crossing_b = b;
            out.fixed_point = values[static_cast<std::size_t>(b)] == b;
            break;
        }
    }
    return out;
}

ZnEstimate estimate_zn(const BoxGeometry& box, double a, const FunctionalKind& kind,
                       std::int64_t replicas, std::uint64_t seed, int workers) {
    if (replicas < 1) throw std::invalid_argument("need at least one replica");

    auto count_range = [&](std::int64_t first, std::int64_t last) {
        std::int64_t hits = 0;
        for (std::int64_t i = first; i < last; ++i)
            if (coupling_trajectory(box, a, kind, subseed(seed, static_cast<std::uint64_t>(i), 0x2e91ULL))
                    .fixed_point)
                ++hits;
        return hits;
    };

    std::int64_t hits = 0;
    if (workers <= 1 || replicas < 256) {
        hits = count_range(0, replicas);
    } else {
        std::vector<std::int64_t> partial(static_cast<std::size_t>(workers), 0);
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) {
            const std::int64_t first = replicas * w / workers;
            const std::int64_t last = replicas * (w + 1) / workers;
            pool.emplace_back([&, w, first, last] { partial[static_cast<std::size_t>(w)] = count_range(first, last); });
        }
        for (auto& t : pool) t.join();
        for (std::int64_t h : partial) hits += h;
    }

    ZnEstimate out;
    out.replicas = replicas;
    out.fixed_points = hits;
    out.estimate = static_cast<double>(hits) / static_cast<double>(replicas);
    out.std_error =
        std::sqrt(out.estimate * (1.0 - out.estimate) / static_cast<double>(replicas));
    return out;
}

namespace {

struct StopScan {
    StoppingRecord record;
    Configuration config;  // omega(B, S)
};

// Worst functional value reachable by closing one edge; closing an already
// closed edge leaves the configuration unchanged, so with any open edge the
// minimum runs over open edges only.
std::int64_t min_after_single_closure(const BoxGeometry& box, Configuration& config,
                                      const FunctionalKind& kind) {
    std::int64_t best = evaluate_functional(kind, box, analyze(box, config));
    for (EdgeId e = 0; e < box.edge_count(); ++e) {
        if (!config.open(e)) continue;
        config.set(e, false);
        best = std::min(best, evaluate_functional(kind, box, analyze(box, config)));
        config.set(e, true);
    }
    return best;
}

StopScan detect_stopping_full(const BoxGeometry& box, double a, const FunctionalKind& kind,
                              std::uint64_t seed) {
    if (kind.which != Functional::kCmax && kind.which != Functional::kBoundary)
        throw std::invalid_argument("stopping times are defined for the cmax and boundary functionals");
    if (kind.which == Functional::kBoundary && box.torus())
        throw std::invalid_argument("boundary functional requires a free-boundary box");

    const std::int64_t nd = box.vertex_count();
    std::vector<std::int64_t> rows = closure_rows(box, a, seed);

    // closure events (row, step) in lexicographic order; edge e closes at
    // inner step e+1 of its row
    std::vector<EdgeId> events(static_cast<std::size_t>(box.edge_count()));
    std::iota(events.begin(), events.end(), 0);
    std::sort(events.begin(), events.end(), [&](EdgeId x, EdgeId y) {
        if (rows[static_cast<std::size_t>(x)] != rows[static_cast<std::size_t>(y)])
            return rows[static_cast<std::size_t>(x)] < rows[static_cast<std::size_t>(y)];
        return x < y;
    });

    Configuration config = all_open(box);
    std::int64_t cur_b = 0;
    std::int64_t cur_s = 0;
    std::size_t next_event = 0;

    // Walk to the lexicographically first position whose row clears the
    // threshold. The threshold only moves when the configuration changes,
    // i.e. at closure events, so it is refreshed after each one; between
    // events the stop row is compared against the next event position.
    auto scan_until = [&](auto&& threshold_row) {
        std::int64_t needed = threshold_row();
        while (cur_b < needed) {
            if (next_event < events.size()) {
                const EdgeId e = events[next_event];
                const std::int64_t eb = rows[static_cast<std::size_t>(e)];
                if (eb < needed) {
                    ++next_event;
                    config.set(e, false);
                    cur_b = eb;
                    cur_s = e + 1;
                    needed = threshold_row();
                    continue;
                }
            }
            cur_b = needed;  // (needed, 0) precedes any event in that row
            cur_s = 0;
        }
        if (cur_b > nd - 2) throw std::logic_error("stopping scan ran past its guaranteed bound");
    };

    StopScan out;
    out.record.kind = kind;

    if (kind.which == Functional::kCmax) {
        scan_until([&] {
            return std::max<std::int64_t>(0, min_after_single_closure(box, config, kind) - 2);
        });
        out.record.b = cur_b;
        out.record.s = cur_s;
        out.record.value_at_stop = analyze(box, config).cmax_size;
        out.config = config;
        return out;
    }

    // boundary functional: first wait until every boundary cluster is small
    // against 2b+3, then until one closure can push |M_n| under b+2
    scan_until([&] {
        const std::int64_t cn = analyze(box, config).cn_size;
        return std::max<std::int64_t>(0, (cn - 3 + 1) / 2);
    });
    out.record.b = cur_b;
    out.record.s = cur_s;
    out.record.value_at_stop = analyze(box, config).cn_size;

    const FunctionalKind boundary_kind = FunctionalKind::boundary();
    scan_until([&] {
        return std::max<std::int64_t>(0, min_after_single_closure(box, config, boundary_kind) - 2);
    });
    out.record.b2 = cur_b;
    out.record.s2 = cur_s;
    out.record.value_at_stop2 =
        static_cast<std::int64_t>(analyze(box, config).boundary_connected.size());
    out.config = config;
    return out;
}

}  // namespace

StoppingRecord detect_stopping(const BoxGeometry& box, double a, const FunctionalKind& kind,
                               std::uint64_t seed) {
    return detect_stopping_full(box, a, kind, seed).record;
}

HappyEventResult simulate_happy_event(const BoxGeometry& box, double a, std::uint64_t seed) {
    if (box.torus())
        throw std::invalid_argument("the happy event is defined on the free-boundary box");

    StopScan scan = detect_stopping_full(box, a, FunctionalKind::cmax(), seed);
    const std::int64_t stop_b = scan.record.b;
    const std::int64_t stop_s = scan.record.s;

    const ClusterAnalysis analysis = analyze(box, scan.config);
    HappyEventResult out;
    out.stop_b = stop_b;
    out.stop_s = stop_s;
    out.cmax_at_stop = analysis.cmax_size;

    // the largest cluster, ties resolved towards the smallest vertex id
    std::vector<std::int64_t> label_size(static_cast<std::size_t>(box.vertex_count()), 0);
    for (VertexId v = 0; v < box.vertex_count(); ++v)
        ++label_size[static_cast<std::size_t>(analysis.label[static_cast<std::size_t>(v)])];
    VertexId root = -1;
    for (VertexId v = 0; v < box.vertex_count() && root < 0; ++v)
        if (label_size[static_cast<std::size_t>(analysis.label[static_cast<std::size_t>(v)])] ==
            analysis.cmax_size)
            root = v;

    const ClusterSubgraph sub = cluster_subgraph(box, analysis, root);
    std::int32_t root_index = -1;
    for (std::size_t i = 0; i < sub.vertex_ids.size(); ++i)
        if (sub.vertex_ids[i] == root) root_index = static_cast<std::int32_t>(i);

    const std::int64_t target = stop_b + 2;
    if (target > static_cast<std::int64_t>(sub.vertex_ids.size()))
        throw std::logic_error("stopping sandwich violated: largest cluster below B+2");
    std::vector<std::int32_t> cut;
    if (target < static_cast<std::int64_t>(sub.vertex_ids.size()))
        cut = carve(sub.graph, root_index, target);
    out.cut_size = static_cast<std::int64_t>(cut.size());

    std::vector<std::uint8_t> in_cut(static_cast<std::size_t>(box.edge_count()), 0);
    for (std::int32_t ce : cut) in_cut[static_cast<std::size_t>(sub.edge_ids[static_cast<std::size_t>(ce)])] = 1;
    std::vector<std::uint8_t> in_cluster(static_cast<std::size_t>(box.vertex_count()), 0);
    for (VertexId v : sub.vertex_ids) in_cluster[static_cast<std::size_t>(v)] = 1;

    CouplingState field(box, a, seed);  // only for x_value lookups
    bool occurred = true;
    for (EdgeId e = 0; e < box.edge_count() && occurred; ++e) {
        const Edge& ed = box.edge(e);
        if (!in_cluster[static_cast<std::size_t>(ed.u)] || !in_cluster[static_cast<std::size_t>(ed.v)])
            continue;
        // rest of row B: every cluster edge must survive
        if (e + 1 > stop_s && !field.x_value(stop_b, e)) occurred = false;
        // row B+1: exactly the carve cut closes
        if (occurred) {
            const bool survives = field.x_value(stop_b + 1, e);
            if (in_cut[static_cast<std::size_t>(e)] ? survives : !survives) occurred = false;
        }
    }
    out.occurred = occurred;

    const Configuration after = coupling_config(box, a, stop_b + 2, seed);
    out.cmax_after = analyze(box, after).cmax_size;
    out.check = !occurred || out.cmax_after == target;
    return out;
}

}  // namespace socperc
