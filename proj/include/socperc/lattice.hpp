#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace socperc {

using VertexId = std::int32_t;
using EdgeId = std::int32_t;

// Index-width guard: vertex and edge counts must stay below this.
inline constexpr std::int64_t kIndexLimit = std::int64_t{1} << 28;

struct Edge {
    VertexId u = -1;   // lexicographically smaller endpoint
    VertexId v = -1;
    std::int8_t axis = 0;
    bool wrap = false; // periodic edge (torus only)
};

// The box Lambda(n) = {-floor(n/2), ..., floor((n-1)/2)}^d with its nearest
// neighbour edges, either free or periodic. Vertex ids are row-major over the
// coordinate ranges (axis 0 most significant), so ascending id is ascending
// lexicographic coordinate order. Edges are stored in their canonical total
// order: (smaller endpoint, axis, wrap flag). Immutable after construction.
class BoxGeometry {
public:
    static BoxGeometry build(int dim, int side, bool torus);

    int dim() const { return dim_; }
    int side() const { return side_; }
    bool torus() const { return torus_; }
    std::int64_t vertex_count() const { return vertex_count_; }
    EdgeId edge_count() const { return static_cast<EdgeId>(edges_.size()); }

    int coord_lo() const { return lo_; }
    int coord_hi() const { return lo_ + side_ - 1; }

    const std::vector<Edge>& edges() const { return edges_; }
    const Edge& edge(EdgeId e) const { return edges_[static_cast<std::size_t>(e)]; }

    int coord(VertexId v, int axis) const {
        std::int64_t x = v;
        for (int i = dim_ - 1; i > axis; --i) x /= side_;
        return lo_ + static_cast<int>(x % side_);
    }

    void coords(VertexId v, int* out) const {
        std::int64_t x = v;
        for (int i = dim_ - 1; i >= 0; --i) {
            out[i] = lo_ + static_cast<int>(x % side_);
            x /= side_;
        }
    }

    // coordinates must lie inside the box
    VertexId vertex_at(const int* c) const {
        std::int64_t id = 0;
        for (int i = 0; i < dim_; ++i) id = id * side_ + (c[i] - lo_);
        return static_cast<VertexId>(id);
    }

    bool contains(const int* c) const {
        for (int i = 0; i < dim_; ++i)
            if (c[i] < lo_ || c[i] > coord_hi()) return false;
        return true;
    }

    bool is_boundary(VertexId v) const { return is_boundary_[static_cast<std::size_t>(v)]; }
    const std::vector<VertexId>& boundary() const { return boundary_; }

    // incident edge ids of a vertex (CSR)
    struct IncidentRange {
        const EdgeId* first;
        const EdgeId* last;
        const EdgeId* begin() const { return first; }
        const EdgeId* end() const { return last; }
    };
    IncidentRange incident(VertexId v) const {
        return {adj_edges_.data() + adj_offsets_[static_cast<std::size_t>(v)],
                adj_edges_.data() + adj_offsets_[static_cast<std::size_t>(v) + 1]};
    }

    VertexId other_end(EdgeId e, VertexId v) const {
        const Edge& ed = edges_[static_cast<std::size_t>(e)];
        return ed.u == v ? ed.v : ed.u;
    }

    bool same(const BoxGeometry& o) const {
        return dim_ == o.dim_ && side_ == o.side_ && torus_ == o.torus_;
    }

private:
    int dim_ = 0;
    int side_ = 0;
    bool torus_ = false;
    int lo_ = 0;
    std::int64_t vertex_count_ = 0;
    std::vector<Edge> edges_;
    std::vector<VertexId> boundary_;
    std::vector<std::uint8_t> is_boundary_;
    std::vector<std::int64_t> adj_offsets_;
    std::vector<EdgeId> adj_edges_;
};

inline BoxGeometry build_box(int dim, int side, bool torus = false) {
    return BoxGeometry::build(dim, side, torus);
}

// Canonical edge enumeration; the identity permutation by construction, kept
// as an explicit surface so callers can rely on the contract.
std::vector<EdgeId> edge_order(const BoxGeometry& box);

}  // namespace socperc
