#include "socperc/lattice.hpp"

#include <numeric>
#include <stdexcept>
#include <string>

namespace socperc {

BoxGeometry BoxGeometry::build(int dim, int side, bool torus) {
    if (dim < 2) throw std::invalid_argument("box dimension must be >= 2");
    if (side < 2) throw std::invalid_argument("box side must be >= 2");

    std::int64_t nv = 1;
    for (int i = 0; i < dim; ++i) {
        nv *= side;
        if (nv > kIndexLimit)
            throw std::invalid_argument("vertex count " + std::to_string(side) + "^" +
                                        std::to_string(dim) + " exceeds index limit");
    }
    const std::int64_t ne = torus ? static_cast<std::int64_t>(dim) * nv
                                  : static_cast<std::int64_t>(dim) * nv -
                                        static_cast<std::int64_t>(dim) * nv / side;
    if (ne > kIndexLimit) throw std::invalid_argument("edge count exceeds index limit");

    BoxGeometry box;
    box.dim_ = dim;
    box.side_ = side;
    box.torus_ = torus;
    box.lo_ = -(side / 2);
    box.vertex_count_ = nv;
    box.edges_.reserve(static_cast<std::size_t>(ne));

    // Vertices ascend in lexicographic coordinate order, so emitting the
    // (smaller-endpoint, axis, wrap) triples in this loop yields the sorted
    // canonical order directly. A torus with side 2 produces parallel pairs;
    // the wrap flag is the tie-break.
    std::vector<int> c(static_cast<std::size_t>(dim), box.lo_);
    const int hi = box.lo_ + side - 1;
    for (VertexId v = 0; v < nv; ++v) {
        box.coords(v, c.data());
        for (int axis = 0; axis < dim; ++axis) {
            if (c[axis] < hi) {
                const int save = c[axis];
                c[axis] = save + 1;
                box.edges_.push_back({v, box.vertex_at(c.data()), static_cast<std::int8_t>(axis), false});
                c[axis] = save;
            }
            if (torus && c[axis] == box.lo_) {
                const int save = c[axis];
                c[axis] = hi;
                box.edges_.push_back({v, box.vertex_at(c.data()), static_cast<std::int8_t>(axis), true});
                c[axis] = save;
            }
        }
    }
    if (static_cast<std::int64_t>(box.edges_.size()) != ne)
        throw std::logic_error("edge enumeration does not match the closed form");

    box.is_boundary_.assign(static_cast<std::size_t>(nv), 0);
    if (!torus) {
        for (VertexId v = 0; v < nv; ++v) {
            box.coords(v, c.data());
            for (int axis = 0; axis < dim; ++axis) {
                if (c[axis] == box.lo_ || c[axis] == hi) {
                    box.is_boundary_[static_cast<std::size_t>(v)] = 1;
                    box.boundary_.push_back(v);
                    break;
                }
            }
        }
    }

    box.adj_offsets_.assign(static_cast<std::size_t>(nv) + 1, 0);
    for (const Edge& e : box.edges_) {
        ++box.adj_offsets_[static_cast<std::size_t>(e.u) + 1];
        ++box.adj_offsets_[static_cast<std::size_t>(e.v) + 1];
    }
    std::partial_sum(box.adj_offsets_.begin(), box.adj_offsets_.end(), box.adj_offsets_.begin());
    box.adj_edges_.assign(static_cast<std::size_t>(2) * box.edges_.size(), 0);
    std::vector<std::int64_t> cursor(box.adj_offsets_.begin(), box.adj_offsets_.end() - 1);
    for (EdgeId e = 0; e < box.edge_count(); ++e) {
        const Edge& ed = box.edges_[static_cast<std::size_t>(e)];
        box.adj_edges_[static_cast<std::size_t>(cursor[static_cast<std::size_t>(ed.u)]++)] = e;
        box.adj_edges_[static_cast<std::size_t>(cursor[static_cast<std::size_t>(ed.v)]++)] = e;
    }
    return box;
}

std::vector<EdgeId> edge_order(const BoxGeometry& box) {
    std::vector<EdgeId> order(static_cast<std::size_t>(box.edge_count()));
    std::iota(order.begin(), order.end(), 0);
    return order;
}

}  // namespace socperc
