#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <set>

#include "socperc/lattice.hpp"

using namespace socperc;

namespace {

std::int64_t ipow(std::int64_t base, int exp) {
    std::int64_t v = 1;
    for (int i = 0; i < exp; ++i) v *= base;
    return v;
}

}  // namespace

TEST_CASE("small boxes match the closed-form counts") {
    const BoxGeometry sq = build_box(2, 2, false);
    CHECK(sq.vertex_count() == 4);
    CHECK(sq.edge_count() == 4);
    CHECK(sq.boundary().size() == 4);
    for (VertexId v = 0; v < 4; ++v) {
        CHECK(sq.coord(v, 0) >= -1);
        CHECK(sq.coord(v, 0) <= 0);
    }

    const BoxGeometry b3 = build_box(2, 3, false);
    CHECK(b3.vertex_count() == 9);
    CHECK(b3.edge_count() == 12);
    CHECK(b3.boundary().size() == 8);

    const BoxGeometry cube = build_box(3, 2, false);
    CHECK(cube.vertex_count() == 8);
    CHECK(cube.edge_count() == 12);

    const BoxGeometry torus3 = build_box(2, 3, true);
    CHECK(torus3.vertex_count() == 9);
    CHECK(torus3.edge_count() == 18);
    CHECK(torus3.boundary().empty());
}

TEST_CASE("vertex and edge counts for d in {2,3}, n in 2..16") {
    for (int d : {2, 3}) {
        for (int n = 2; n <= 16; ++n) {
            if (d == 3 && n > 12) continue;  // keep the suite quick
            const BoxGeometry free_box = build_box(d, n, false);
            CHECK(free_box.vertex_count() == ipow(n, d));
            CHECK(free_box.edge_count() == d * ipow(n, d) - d * ipow(n, d - 1));
            const BoxGeometry torus = build_box(d, n, true);
            CHECK(torus.edge_count() == d * ipow(n, d));
            CHECK(torus.boundary().empty());
        }
    }
}

TEST_CASE("boundary vertices are exactly those of lattice degree < 2d") {
    for (int d : {2, 3}) {
        const BoxGeometry box = build_box(d, 5, false);
        for (VertexId v = 0; v < box.vertex_count(); ++v) {
            const auto inc = box.incident(v);
            const auto degree = inc.last - inc.first;
            CHECK(box.is_boundary(v) == (degree < 2 * d));
        }
    }
}

TEST_CASE("edges join nearest neighbours, wrap edges jump n-1") {
    for (bool torus : {false, true}) {
        const BoxGeometry box = build_box(2, 5, torus);
        for (const Edge& e : box.edges()) {
            int l1 = 0;
            for (int i = 0; i < 2; ++i) l1 += std::abs(box.coord(e.u, i) - box.coord(e.v, i));
            if (e.wrap)
                CHECK(l1 == 4);
            else
                CHECK(l1 == 1);
        }
    }
}

TEST_CASE("edge order is a deterministic permutation") {
    const BoxGeometry a = build_box(2, 4, false);
    const BoxGeometry b = build_box(2, 4, false);
    const auto order_a = edge_order(a);
    const auto order_b = edge_order(b);
    CHECK(order_a == order_b);
    std::set<EdgeId> ids(order_a.begin(), order_a.end());
    CHECK(ids.size() == static_cast<std::size_t>(a.edge_count()));
    CHECK(*ids.begin() == 0);
    CHECK(*ids.rbegin() == a.edge_count() - 1);

    // first edge sits at the lexicographically least vertex along axis 0
    const BoxGeometry sq = build_box(2, 2, false);
    const Edge& first = sq.edge(0);
    CHECK(sq.coord(first.u, 0) == -1);
    CHECK(sq.coord(first.u, 1) == -1);
    CHECK(first.axis == 0);

    // the canonical order sorts by (smaller endpoint, axis)
    for (EdgeId e = 1; e < a.edge_count(); ++e) {
        const Edge& prev = a.edge(e - 1);
        const Edge& cur = a.edge(e);
        const bool ordered = prev.u < cur.u || (prev.u == cur.u && prev.axis < cur.axis);
        CHECK(ordered);
    }
}

TEST_CASE("torus with side 2 keeps parallel wrap edges") {
    const BoxGeometry t = build_box(2, 2, true);
    CHECK(t.edge_count() == 8);
    int wraps = 0;
    for (const Edge& e : t.edges()) wraps += e.wrap ? 1 : 0;
    CHECK(wraps == 4);
}

TEST_CASE("invalid boxes are rejected") {
    CHECK_THROWS_AS(build_box(1, 4, false), std::invalid_argument);
    CHECK_THROWS_AS(build_box(2, 1, false), std::invalid_argument);
    CHECK_THROWS_AS(build_box(2, 0, false), std::invalid_argument);
    CHECK_THROWS_AS(build_box(8, 128, false), std::invalid_argument);  // index limit
}

TEST_CASE("coordinate round trips") {
    const BoxGeometry box = build_box(3, 4, false);
    int c[3];
    for (VertexId v = 0; v < box.vertex_count(); ++v) {
        box.coords(v, c);
        CHECK(box.vertex_at(c) == v);
        CHECK(box.contains(c));
    }
    int outside[3] = {box.coord_hi() + 1, 0, 0};
    CHECK(!box.contains(outside));
}
