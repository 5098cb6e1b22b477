#include "socperc/separator.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace socperc {

namespace {

// Working subset of a LatticeSubgraph; indices refer to the original graph.
struct View {
    std::vector<std::int32_t> verts;
    std::vector<std::int32_t> edges;
};

struct Scratch {
    const LatticeSubgraph* g = nullptr;
    std::vector<std::int32_t> comp;       // component id per vertex, -1 outside view
    std::vector<std::int8_t> edge_cut;    // marks for the current cut
    std::vector<std::vector<std::int32_t>> adj;  // vertex -> incident view edges

    explicit Scratch(const LatticeSubgraph& graph)
        : g(&graph),
          comp(static_cast<std::size_t>(graph.vertex_count()), -1),
          edge_cut(graph.edges.size(), 0),
          adj(static_cast<std::size_t>(graph.vertex_count())) {}
};

void build_adjacency(Scratch& sc, const View& view) {
    for (std::int32_t v : view.verts) sc.adj[static_cast<std::size_t>(v)].clear();
    for (std::int32_t e : view.edges) {
        sc.adj[static_cast<std::size_t>(sc.g->edges[static_cast<std::size_t>(e)].first)].push_back(e);
        sc.adj[static_cast<std::size_t>(sc.g->edges[static_cast<std::size_t>(e)].second)].push_back(e);
    }
}

// Components of (view, edges \ cut). Assumes adjacency is current. Seeds scan
// ascending, so each component id's seed is its least vertex index.
struct Components {
    std::vector<std::vector<std::int32_t>> members;
    std::int64_t max_size = 0;
    std::int32_t max_id = -1;  // least-seed tie break
};

Components split_components(Scratch& sc, const View& view, const std::vector<std::int32_t>& cut) {
    for (std::int32_t e : cut) sc.edge_cut[static_cast<std::size_t>(e)] = 1;
    for (std::int32_t v : view.verts) sc.comp[static_cast<std::size_t>(v)] = -1;

    Components out;
    std::vector<std::int32_t> queue;
    for (std::int32_t seed : view.verts) {
        if (sc.comp[static_cast<std::size_t>(seed)] >= 0) continue;
        const std::int32_t id = static_cast<std::int32_t>(out.members.size());
        out.members.emplace_back();
        queue.clear();
        queue.push_back(seed);
        sc.comp[static_cast<std::size_t>(seed)] = id;
        for (std::size_t head = 0; head < queue.size(); ++head) {
            const std::int32_t v = queue[head];
            out.members[static_cast<std::size_t>(id)].push_back(v);
            for (std::int32_t e : sc.adj[static_cast<std::size_t>(v)]) {
                if (sc.edge_cut[static_cast<std::size_t>(e)]) continue;
                const auto& ed = sc.g->edges[static_cast<std::size_t>(e)];
                const std::int32_t w = ed.first == v ? ed.second : ed.first;
                if (sc.comp[static_cast<std::size_t>(w)] >= 0) continue;
                sc.comp[static_cast<std::size_t>(w)] = id;
                queue.push_back(w);
            }
        }
        const std::int64_t sz = static_cast<std::int64_t>(out.members.back().size());
        if (sz > out.max_size) {
            out.max_size = sz;
            out.max_id = id;
        }
    }
    for (std::int32_t e : cut) sc.edge_cut[static_cast<std::size_t>(e)] = 0;
    return out;
}

std::int64_t pow4_saturated(int dim) {
    std::int64_t v = 1;
    for (int i = 0; i < dim; ++i) {
        if (v > (std::numeric_limits<std::int64_t>::max() >> 2)) return std::numeric_limits<std::int64_t>::max();
        v <<= 2;
    }
    return v;
}

int diam_axis(const Scratch& sc, const View& view, int axis, int* min_out) {
    int lo = std::numeric_limits<int>::max(), hi = std::numeric_limits<int>::min();
    for (std::int32_t v : view.verts) {
        const int c = sc.g->vertex(v)[axis];
        lo = std::min(lo, c);
        hi = std::max(hi, c);
    }
    if (min_out) *min_out = lo;
    return hi - lo;
}

// Base case: the diameter fits in a box of side diam+1, so cutting the two
// central slices along the widest axis leaves strips of at most half the box.
std::vector<std::int32_t> central_slices(const Scratch& sc, const View& view) {
    const int d = sc.g->dim;
    int best_axis = 0, best_diam = -1, best_min = 0;
    for (int axis = 0; axis < d; ++axis) {
        int mn = 0;
        const int dm = diam_axis(sc, view, axis, &mn);
        if (dm > best_diam) {
            best_diam = dm;
            best_axis = axis;
            best_min = mn;
        }
    }
    std::vector<std::int32_t> cut;
    if (best_diam <= 0) return cut;
    const int side = best_diam + 1;
    const int mid = best_min + side / 2;  // translated coordinate 0
    for (std::int32_t e : view.edges) {
        const auto& ed = sc.g->edges[static_cast<std::size_t>(e)];
        const int cu = sc.g->vertex(ed.first)[best_axis];
        const int cv = sc.g->vertex(ed.second)[best_axis];
        if (cu == cv) continue;
        const int low = std::min(cu, cv) - mid;
        if (low == -1 || low == 0) cut.push_back(e);
    }
    return cut;
}

// One level of the diameter-shrinking recursion: remove the lightest slice in
// the middle third of every axis that is still too wide, then recurse on the
// largest remaining component.
void halve_rec(Scratch& sc, View view, double A, int k, std::vector<std::int32_t>& out) {
    while (true) {
        if (view.verts.size() <= 1) return;
        build_adjacency(sc, view);
        if (k == 0) {
            auto cut = central_slices(sc, view);
            out.insert(out.end(), cut.begin(), cut.end());
            return;
        }

        const int d = sc.g->dim;
        const double diam_limit = std::pow(1.5, k - 1) * (A - 1.0);
        std::vector<std::int32_t> slice_cut;
        for (int axis = 0; axis < d; ++axis) {
            int mn = 0;
            const int dm = diam_axis(sc, view, axis, &mn);
            if (!(static_cast<double>(dm) > diam_limit)) continue;
            const int third = dm / 3;
            // best slice in the window (third, 2*third], ties to the smallest
            std::vector<std::int32_t> count(static_cast<std::size_t>(dm + 1), 0);
            for (std::int32_t e : view.edges) {
                const auto& ed = sc.g->edges[static_cast<std::size_t>(e)];
                const int cu = sc.g->vertex(ed.first)[axis];
                const int cv = sc.g->vertex(ed.second)[axis];
                if (cu == cv) continue;
                ++count[static_cast<std::size_t>(std::min(cu, cv) - mn)];
            }
            int best_k = third + 1;
            for (int ki = third + 1; ki <= 2 * third; ++ki)
                if (count[static_cast<std::size_t>(ki)] < count[static_cast<std::size_t>(best_k)]) best_k = ki;
            assert(count[static_cast<std::size_t>(best_k)] <=
                   12.0 * d * std::pow(2.0 / 3.0, k - 1) * std::pow(A, d - 1) + 1e-9);
            for (std::int32_t e : view.edges) {
                const auto& ed = sc.g->edges[static_cast<std::size_t>(e)];
                const int cu = sc.g->vertex(ed.first)[axis];
                const int cv = sc.g->vertex(ed.second)[axis];
                if (cu != cv && std::min(cu, cv) - mn == best_k) slice_cut.push_back(e);
            }
        }

        if (slice_cut.empty()) {
            // nothing exceeded the limit; the level is a no-op
            --k;
            continue;
        }
        out.insert(out.end(), slice_cut.begin(), slice_cut.end());

        Components comps = split_components(sc, view, slice_cut);
        for (std::int32_t e : slice_cut) sc.edge_cut[static_cast<std::size_t>(e)] = 1;
        View next;
        next.verts = std::move(comps.members[static_cast<std::size_t>(comps.max_id)]);
        std::sort(next.verts.begin(), next.verts.end());
        // keep the component ids valid while filtering edges
        next.edges.reserve(view.edges.size());
        for (std::int32_t e : view.edges) {
            const auto& ed = sc.g->edges[static_cast<std::size_t>(e)];
            if (sc.comp[static_cast<std::size_t>(ed.first)] == comps.max_id &&
                sc.comp[static_cast<std::size_t>(ed.second)] == comps.max_id &&
                !sc.edge_cut[static_cast<std::size_t>(e)])
                next.edges.push_back(e);
        }
        for (std::int32_t e : slice_cut) sc.edge_cut[static_cast<std::size_t>(e)] = 0;
        view = std::move(next);
        --k;
    }
}

std::vector<std::int32_t> bisect_view(Scratch& sc, const View& view) {
    const std::int64_t nv = static_cast<std::int64_t>(view.verts.size());
    if (nv == 0) return {};
    const int d = sc.g->dim;
    if (nv < pow4_saturated(d)) {
        build_adjacency(sc, view);
        Components comps = split_components(sc, view, {});
        if (comps.max_size <= (nv + 1) / 2) return {};
        return view.edges;
    }
    const double A = std::pow(static_cast<double>(nv), 1.0 / d) * (1.0 + 1e-12);
    const int k = static_cast<int>(std::ceil((d * std::log(A) - std::log(A - 1.0)) / std::log(1.5)));
    std::vector<std::int32_t> out;
    halve_rec(sc, view, A, k, out);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

void validate_graph(const LatticeSubgraph& g) {
    if (g.dim < 2) throw std::invalid_argument("subgraph dimension must be >= 2");
    const std::int32_t nv = g.vertex_count();
    for (const auto& e : g.edges) {
        if (e.first < 0 || e.first >= nv || e.second < 0 || e.second >= nv)
            throw std::invalid_argument("subgraph edge endpoint out of range");
        int l1 = 0;
        for (int i = 0; i < g.dim; ++i) l1 += std::abs(g.vertex(e.first)[i] - g.vertex(e.second)[i]);
        if (l1 != 1) throw std::invalid_argument("subgraph edge does not join lattice neighbours");
    }
}

View full_view(const LatticeSubgraph& g) {
    View v;
    v.verts.resize(static_cast<std::size_t>(g.vertex_count()));
    for (std::int32_t i = 0; i < g.vertex_count(); ++i) v.verts[static_cast<std::size_t>(i)] = i;
    v.edges.resize(g.edges.size());
    for (std::size_t i = 0; i < g.edges.size(); ++i) v.edges[i] = static_cast<std::int32_t>(i);
    return v;
}

// Reopening order within a view; `pieces` are the components of (view \ cut).
std::vector<std::int32_t> reopen_order(Scratch& sc, const View& view,
                                       const std::vector<std::int32_t>& cut, std::int32_t x,
                                       const Components& pieces) {
    std::vector<std::int8_t> in_cut_flag(sc.g->edges.size(), 0);
    for (std::int32_t e : cut) in_cut_flag[static_cast<std::size_t>(e)] = 1;

    // cut edges incident to each vertex
    std::vector<std::vector<std::int32_t>> cut_adj(static_cast<std::size_t>(sc.g->vertex_count()));
    for (std::int32_t e : cut) {
        cut_adj[static_cast<std::size_t>(sc.g->edges[static_cast<std::size_t>(e)].first)].push_back(e);
        cut_adj[static_cast<std::size_t>(sc.g->edges[static_cast<std::size_t>(e)].second)].push_back(e);
    }

    std::vector<std::int8_t> merged(pieces.members.size(), 0);
    std::vector<std::int8_t> ordered(sc.g->edges.size(), 0);
    std::set<std::int32_t> available;

    auto merge_piece = [&](std::int32_t piece_id) {
        merged[static_cast<std::size_t>(piece_id)] = 1;
        for (std::int32_t v : pieces.members[static_cast<std::size_t>(piece_id)])
            for (std::int32_t e : cut_adj[static_cast<std::size_t>(v)])
                if (!ordered[static_cast<std::size_t>(e)]) available.insert(e);
    };

    std::vector<std::int32_t> order;
    order.reserve(cut.size());
    merge_piece(sc.comp[static_cast<std::size_t>(x)]);
    while (order.size() < cut.size()) {
        if (available.empty())
            throw std::invalid_argument("cut reopening stalled: the graph is not connected");
        const std::int32_t e = *available.begin();
        available.erase(available.begin());
        ordered[static_cast<std::size_t>(e)] = 1;
        order.push_back(e);
        const auto& ed = sc.g->edges[static_cast<std::size_t>(e)];
        for (std::int32_t end : {ed.first, ed.second}) {
            const std::int32_t piece_id = sc.comp[static_cast<std::size_t>(end)];
            if (!merged[static_cast<std::size_t>(piece_id)]) merge_piece(piece_id);
        }
    }
    (void)view;
    return order;
}

void carve_view(Scratch& sc, View view, std::int32_t x, std::int64_t m,
                std::vector<std::int32_t>& out) {
    while (true) {
        const std::int64_t nv = static_cast<std::int64_t>(view.verts.size());
        if (m == nv) return;  // the whole component is already the answer

        std::vector<std::int32_t> cut = bisect_view(sc, view);
        build_adjacency(sc, view);
        Components pieces = split_components(sc, view, cut);
        std::vector<std::int32_t> order = reopen_order(sc, view, cut, x, pieces);
        // split_components left sc.comp holding the piece ids order relied on

        std::vector<std::int64_t> piece_size(pieces.members.size());
        for (std::size_t i = 0; i < pieces.members.size(); ++i)
            piece_size[i] = static_cast<std::int64_t>(pieces.members[i].size());

        std::vector<std::int8_t> merged(pieces.members.size(), 0);
        const std::int32_t x_piece = sc.comp[static_cast<std::size_t>(x)];
        merged[static_cast<std::size_t>(x_piece)] = 1;
        std::int64_t grown = piece_size[static_cast<std::size_t>(x_piece)];

        std::size_t sigma = 0;
        std::int32_t next_root = x;
        std::int32_t next_piece = x_piece;
        std::int64_t next_goal = m;
        if (grown < m) {
            for (std::size_t s = 1; s <= order.size(); ++s) {
                const auto& ed = sc.g->edges[static_cast<std::size_t>(order[s - 1])];
                const bool um = !merged[static_cast<std::size_t>(sc.comp[static_cast<std::size_t>(ed.first)])];
                const bool uv = !merged[static_cast<std::size_t>(sc.comp[static_cast<std::size_t>(ed.second)])];
                if (um && uv) throw std::logic_error("reopening order produced a detached edge");
                if (!um && !uv) continue;
                const std::int32_t fresh = um ? ed.first : ed.second;
                const std::int32_t piece_id = sc.comp[static_cast<std::size_t>(fresh)];
                merged[static_cast<std::size_t>(piece_id)] = 1;
                const std::int64_t before = grown;
                grown += piece_size[static_cast<std::size_t>(piece_id)];
                if (grown >= m) {
                    sigma = s;
                    next_root = fresh;
                    next_piece = piece_id;
                    next_goal = m - before;
                    break;
                }
            }
            if (grown < m) throw std::logic_error("carve replay never reached the goal size");
        }

        // keep the cut edges after sigma closed, and descend into the piece
        // that made the component overshoot
        out.insert(out.end(), order.begin() + static_cast<std::ptrdiff_t>(sigma), order.end());

        std::vector<std::int8_t> in_cut_flag(sc.g->edges.size(), 0);
        for (std::int32_t e : cut) in_cut_flag[static_cast<std::size_t>(e)] = 1;
        View sub;
        sub.verts = std::move(pieces.members[static_cast<std::size_t>(next_piece)]);
        std::sort(sub.verts.begin(), sub.verts.end());
        for (std::int32_t e : view.edges) {
            const auto& ed = sc.g->edges[static_cast<std::size_t>(e)];
            if (in_cut_flag[static_cast<std::size_t>(e)]) continue;
            if (sc.comp[static_cast<std::size_t>(ed.first)] == next_piece &&
                sc.comp[static_cast<std::size_t>(ed.second)] == next_piece)
                sub.edges.push_back(e);
        }
        view = std::move(sub);
        x = next_root;
        m = next_goal;
    }
}

}  // namespace

std::vector<std::int32_t> bisect(const LatticeSubgraph& g) {
    validate_graph(g);
    if (g.vertex_count() == 0) return {};
    Scratch sc(g);
    return bisect_view(sc, full_view(g));
}

std::vector<std::int32_t> carve(const LatticeSubgraph& g, std::int32_t x, std::int64_t m) {
    validate_graph(g);
    const std::int64_t nv = g.vertex_count();
    if (x < 0 || x >= nv) throw std::invalid_argument("carve root is not a vertex of the graph");
    if (m < 1 || m > nv) throw std::invalid_argument("carve goal size is out of range");

    Scratch sc(g);
    View view = full_view(g);
    build_adjacency(sc, view);
    Components comps = split_components(sc, view, {});
    if (comps.members.size() != 1) throw std::invalid_argument("carve requires a connected graph");

    std::vector<std::int32_t> out;
    carve_view(sc, std::move(view), x, m, out);
    std::sort(out.begin(), out.end());

#ifndef NDEBUG
    {
        View check = full_view(g);
        build_adjacency(sc, check);
        Components after = split_components(sc, check, out);
        const std::int32_t cid = sc.comp[static_cast<std::size_t>(x)];
        assert(static_cast<std::int64_t>(after.members[static_cast<std::size_t>(cid)].size()) == m);
    }
#endif
    return out;
}

std::vector<std::int32_t> surgeon_reopen_order(const LatticeSubgraph& g,
                                               const std::vector<std::int32_t>& cut,
                                               std::int32_t x) {
    validate_graph(g);
    if (x < 0 || x >= g.vertex_count()) throw std::invalid_argument("root is not a vertex of the graph");
    for (std::int32_t e : cut)
        if (e < 0 || static_cast<std::size_t>(e) >= g.edges.size())
            throw std::invalid_argument("cut edge index out of range");
    Scratch sc(g);
    View view = full_view(g);
    build_adjacency(sc, view);
    Components pieces = split_components(sc, view, cut);
    return reopen_order(sc, view, cut, x, pieces);
}

double bisect_cut_bound(int dim, std::int64_t vertex_count) {
    return std::pow(4.0, dim + 1) * dim * dim *
           std::pow(static_cast<double>(vertex_count), (dim - 1.0) / dim);
}

double carve_cut_bound(int dim, std::int64_t vertex_count) {
    const double a = std::pow(2.0, -(dim - 1.0) / dim);
    return bisect_cut_bound(dim, vertex_count) / (1.0 - a);
}

ClusterSubgraph cluster_subgraph(const BoxGeometry& box, const ClusterAnalysis& analysis,
                                 VertexId root) {
    const std::int32_t root_label = analysis.label[static_cast<std::size_t>(root)];
    ClusterSubgraph out;
    out.graph.dim = box.dim();
    std::vector<std::int32_t> index(static_cast<std::size_t>(box.vertex_count()), -1);
    std::vector<int> c(static_cast<std::size_t>(box.dim()));
    for (VertexId v = 0; v < box.vertex_count(); ++v) {
        if (analysis.label[static_cast<std::size_t>(v)] != root_label) continue;
        index[static_cast<std::size_t>(v)] = static_cast<std::int32_t>(out.vertex_ids.size());
        out.vertex_ids.push_back(v);
        box.coords(v, c.data());
        out.graph.coords.insert(out.graph.coords.end(), c.begin(), c.end());
    }
    for (EdgeId e = 0; e < box.edge_count(); ++e) {
        if (!analysis.open_bits[static_cast<std::size_t>(e)]) continue;
        const Edge& ed = box.edge(e);
        const std::int32_t iu = index[static_cast<std::size_t>(ed.u)];
        const std::int32_t iv = index[static_cast<std::size_t>(ed.v)];
        if (iu < 0 || iv < 0) continue;
        out.graph.edges.emplace_back(iu, iv);
        out.edge_ids.push_back(e);
    }
    return out;
}

}  // namespace socperc
