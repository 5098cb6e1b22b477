#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <set>

#include "socperc/percolation.hpp"
#include "socperc/rng.hpp"
#include "socperc/separator.hpp"

using namespace socperc;

namespace {

LatticeSubgraph path_graph(int len) {
    LatticeSubgraph g;
    g.dim = 2;
    for (int i = 0; i < len; ++i) {
        g.coords.push_back(i);
        g.coords.push_back(0);
        if (i > 0) g.edges.emplace_back(i - 1, i);
    }
    return g;
}

LatticeSubgraph unit_square() {
    LatticeSubgraph g;
    g.dim = 2;
    const int pts[4][2] = {{0, 0}, {1, 0}, {0, 1}, {1, 1}};
    for (auto& p : pts) {
        g.coords.push_back(p[0]);
        g.coords.push_back(p[1]);
    }
    g.edges = {{0, 1}, {0, 2}, {1, 3}, {2, 3}};
    return g;
}

// independent component sizes by flood fill over an edge subset
std::vector<std::int64_t> component_sizes(const LatticeSubgraph& g,
                                          const std::vector<std::int32_t>& removed,
                                          std::vector<std::int32_t>* comp_of = nullptr) {
    std::set<std::int32_t> cut(removed.begin(), removed.end());
    std::vector<std::vector<std::int32_t>> adj(static_cast<std::size_t>(g.vertex_count()));
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
        if (cut.count(static_cast<std::int32_t>(i))) continue;
        adj[static_cast<std::size_t>(g.edges[i].first)].push_back(g.edges[i].second);
        adj[static_cast<std::size_t>(g.edges[i].second)].push_back(g.edges[i].first);
    }
    std::vector<std::int32_t> comp(static_cast<std::size_t>(g.vertex_count()), -1);
    std::vector<std::int64_t> sizes;
    std::vector<std::int32_t> stack;
    for (std::int32_t seed = 0; seed < g.vertex_count(); ++seed) {
        if (comp[static_cast<std::size_t>(seed)] >= 0) continue;
        const std::int32_t id = static_cast<std::int32_t>(sizes.size());
        sizes.push_back(0);
        stack.push_back(seed);
        comp[static_cast<std::size_t>(seed)] = id;
        while (!stack.empty()) {
            const std::int32_t v = stack.back();
            stack.pop_back();
            ++sizes[static_cast<std::size_t>(id)];
            for (std::int32_t w : adj[static_cast<std::size_t>(v)]) {
                if (comp[static_cast<std::size_t>(w)] >= 0) continue;
                comp[static_cast<std::size_t>(w)] = id;
                stack.push_back(w);
            }
        }
    }
    if (comp_of) *comp_of = comp;
    return sizes;
}

// a random open cluster of a percolation configuration, as a subgraph
LatticeSubgraph random_cluster(const BoxGeometry& box, RandomStream& rng, double p) {
    const Configuration config = sample_bernoulli(box, p, rng);
    const ClusterAnalysis analysis = analyze(box, config);
    const VertexId root = static_cast<VertexId>(rng.next_below(static_cast<std::uint64_t>(box.vertex_count())));
    return cluster_subgraph(box, analysis, root).graph;
}

}  // namespace

TEST_CASE("bisect halves tiny graphs") {
    const LatticeSubgraph two = path_graph(2);
    const auto cut2 = bisect(two);
    CHECK(cut2.size() == 1);  // only way to reach components of size <= 1

    const LatticeSubgraph square = unit_square();
    const auto cut4 = bisect(square);
    const auto sizes = component_sizes(square, cut4);
    for (std::int64_t s : sizes) CHECK(s <= 2);
    CHECK(static_cast<double>(cut4.size()) <= bisect_cut_bound(2, 4));

    LatticeSubgraph empty;
    empty.dim = 2;
    CHECK(bisect(empty).empty());

    // an already small graph needs no cut at all
    LatticeSubgraph pair;
    pair.dim = 2;
    pair.coords = {0, 0, 5, 5};
    CHECK(bisect(pair).empty());
}

TEST_CASE("bisect on random clusters: halving and cut bounds") {
    RandomStream rng(17);
    const BoxGeometry box = build_box(2, 32, false);
    for (int trial = 0; trial < 200; ++trial) {
        const LatticeSubgraph g = random_cluster(box, rng, 0.3 + 0.4 * rng.next_unit());
        const auto cut = bisect(g);
        const auto sizes = component_sizes(g, cut);
        const std::int64_t nv = g.vertex_count();
        for (std::int64_t s : sizes) REQUIRE(s <= (nv + 1) / 2);
        REQUIRE(static_cast<double>(cut.size()) <= bisect_cut_bound(2, nv));
    }
}

TEST_CASE("carve hits the exact goal on a path") {
    const LatticeSubgraph five = path_graph(5);
    const auto cut = carve(five, 0, 2);
    std::vector<std::int32_t> comp;
    component_sizes(five, cut, &comp);
    std::int64_t root_size = 0;
    for (std::int32_t c : comp)
        if (c == comp[0]) ++root_size;
    CHECK(root_size == 2);
    // the component of the root is exactly {v0, v1}
    CHECK(comp[1] == comp[0]);
    CHECK(comp[2] != comp[0]);

    CHECK(carve(five, 0, 5).empty());
    CHECK_THROWS_AS(carve(five, 0, 6), std::invalid_argument);
    CHECK_THROWS_AS(carve(five, 0, 0), std::invalid_argument);
    CHECK_THROWS_AS(carve(five, 9, 2), std::invalid_argument);
}

TEST_CASE("carve rejects disconnected graphs") {
    LatticeSubgraph g;
    g.dim = 2;
    g.coords = {0, 0, 3, 3};
    CHECK_THROWS_AS(carve(g, 0, 1), std::invalid_argument);

    LatticeSubgraph loner;
    loner.dim = 2;
    loner.coords = {0, 0};
    CHECK(carve(loner, 0, 1).empty());
}

TEST_CASE("carve is exact on random connected clusters with random goals") {
    RandomStream rng(29);
    const BoxGeometry box = build_box(2, 24, false);
    int done = 0;
    while (done < 300) {
        const LatticeSubgraph g = random_cluster(box, rng, 0.35 + 0.3 * rng.next_unit());
        const std::int64_t nv = g.vertex_count();
        if (nv < 2) continue;
        ++done;
        const std::int32_t x = static_cast<std::int32_t>(rng.next_below(static_cast<std::uint64_t>(nv)));
        const std::int64_t m = 1 + static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(nv)));
        const auto cut = carve(g, x, m);
        std::vector<std::int32_t> comp;
        component_sizes(g, cut, &comp);
        std::int64_t got = 0;
        for (std::int32_t c : comp)
            if (c == comp[static_cast<std::size_t>(x)]) ++got;
        REQUIRE(got == m);
        REQUIRE(static_cast<double>(cut.size()) <= carve_cut_bound(2, nv));
    }
}

TEST_CASE("carve with goal one leaves the root isolated") {
    RandomStream rng(31);
    const BoxGeometry box = build_box(2, 8, false);
    for (int trial = 0; trial < 50; ++trial) {
        const LatticeSubgraph g = random_cluster(box, rng, 0.55);
        const std::int32_t x = static_cast<std::int32_t>(rng.next_below(static_cast<std::uint64_t>(g.vertex_count())));
        const auto cut = carve(g, x, 1);
        std::vector<std::int32_t> comp;
        component_sizes(g, cut, &comp);
        for (std::int32_t v = 0; v < g.vertex_count(); ++v)
            if (v != x) REQUIRE(comp[static_cast<std::size_t>(v)] != comp[static_cast<std::size_t>(x)]);
    }
}

TEST_CASE("reopening order grows a nested component chain") {
    RandomStream rng(37);
    const BoxGeometry box = build_box(2, 8, false);
    for (int trial = 0; trial < 60; ++trial) {
        const LatticeSubgraph g = random_cluster(box, rng, 0.6);
        if (g.vertex_count() < 3) continue;
        const auto cut = bisect(g);
        const std::int32_t x = static_cast<std::int32_t>(rng.next_below(static_cast<std::uint64_t>(g.vertex_count())));
        const auto order = surgeon_reopen_order(g, cut, x);
        REQUIRE(order.size() == cut.size());
        REQUIRE(std::set<std::int32_t>(order.begin(), order.end()).size() == cut.size());

        // replay: each reopened edge must touch the current component of x,
        // and the component chain is nested up to the full graph
        std::vector<std::int32_t> closed(order.begin(), order.end());
        std::vector<std::int32_t> comp;
        component_sizes(g, closed, &comp);
        std::set<std::int32_t> current;  // component ids absorbed so far
        std::set<std::int32_t> members;
        for (std::int32_t v = 0; v < g.vertex_count(); ++v)
            if (comp[static_cast<std::size_t>(v)] == comp[static_cast<std::size_t>(x)]) members.insert(v);
        std::int64_t prev_size = static_cast<std::int64_t>(members.size());
        for (std::size_t s = 0; s < order.size(); ++s) {
            const auto& e = g.edges[static_cast<std::size_t>(order[s])];
            const bool touches = members.count(e.first) || members.count(e.second);
            REQUIRE(touches);
            closed.erase(std::find(closed.begin(), closed.end(), order[s]));
            component_sizes(g, closed, &comp);
            members.clear();
            for (std::int32_t v = 0; v < g.vertex_count(); ++v)
                if (comp[static_cast<std::size_t>(v)] == comp[static_cast<std::size_t>(x)]) members.insert(v);
            REQUIRE(static_cast<std::int64_t>(members.size()) >= prev_size);
            prev_size = static_cast<std::int64_t>(members.size());
        }
        REQUIRE(prev_size == g.vertex_count());
    }
    // trivial cases
    const LatticeSubgraph five = path_graph(5);
    CHECK(surgeon_reopen_order(five, {}, 0).empty());
    CHECK(surgeon_reopen_order(five, {2}, 0) == std::vector<std::int32_t>{2});
}

TEST_CASE("subgraph edges must join lattice neighbours") {
    LatticeSubgraph bad;
    bad.dim = 2;
    bad.coords = {0, 0, 2, 0};
    bad.edges = {{0, 1}};
    CHECK_THROWS_AS(bisect(bad), std::invalid_argument);
}
