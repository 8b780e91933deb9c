#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "spinsi/config.hpp"
#include "spinsi/graph.hpp"

using namespace spinsi;

TEST_CASE("build_graph basics and validation") {
    Graph g = build_graph(2, {{0, 1}});
    CHECK(g.n == 2);
    CHECK(g.max_degree == 1);

    Graph c4 = cycle_graph(4);
    CHECK(c4.edges.size() == 4);
    CHECK(c4.max_degree == 2);

    CHECK_THROWS(build_graph(3, {{0, 1}, {0, 1}}));  // duplicate edge
    CHECK_THROWS(build_graph(3, {{0, 0}}));          // self-loop
    CHECK_THROWS(build_graph(3, {{0, 3}}));          // out of range
}

TEST_CASE("grid_graph shapes") {
    Graph g22 = grid_graph({2, 2});
    CHECK(g22.n == 4);
    CHECK(g22.edges.size() == 4);

    Graph p3 = grid_graph({3});
    CHECK(p3.n == 3);
    CHECK(p3.edges.size() == 2);

    Graph g33 = grid_graph({3, 3});
    CHECK(g33.n == 9);
    CHECK(g33.edges.size() == 12);
    CHECK(g33.max_degree == 4);

    CHECK_THROWS(grid_graph({}));
}

TEST_CASE("random_gnp endpoints and mean edge count") {
    Rng rng(1);
    Graph empty = random_gnp(10, 0.0, rng);
    CHECK(empty.edges.empty());
    Graph full = random_gnp(6, 1.0, rng);
    CHECK(full.edges.size() == 15);
    CHECK_THROWS(random_gnp(5, 1.5, rng));

    // mean edge count of G(100, 0.05) over many seeds: binomial mean 247.5
    const int seeds = 10000;
    double total = 0.0;
    Rng root(42);
    for (int s = 0; s < seeds; ++s) {
        Rng sub = root.split(s);
        total += static_cast<double>(random_gnp(100, 0.05, sub).edges.size());
    }
    double mean = total / seeds;
    double expected = 4950 * 0.05;  // 247.5
    double sigma = std::sqrt(4950 * 0.05 * 0.95 / seeds);
    CHECK(std::abs(mean - expected) < 3 * sigma);
}

TEST_CASE("gnp invariants on many instances") {
    Rng root(7);
    for (int t = 0; t < 1000; ++t) {
        Rng sub = root.split(t);
        Graph g = random_gnp(3 + t % 12, 0.3, sub);
        int delta = 0;
        for (int v = 0; v < g.n; ++v) {
            delta = std::max(delta, g.degree(v));
            for (int u : g.adjacency[v]) CHECK(g.has_edge(u, v));
        }
        CHECK(delta == g.max_degree);
    }
}

TEST_CASE("greedy_independent_partition") {
    Graph iso = build_graph(3, {});
    auto p0 = greedy_independent_partition(iso);
    CHECK(p0.k() == 1);

    auto p1 = greedy_independent_partition(single_edge_graph());
    CHECK(p1.k() == 2);

    auto p2 = greedy_independent_partition(grid_graph({3, 3}));
    CHECK(p2.k() == 2);

    // classes independent, disjoint, covering; k <= Delta + 1
    Rng root(3);
    for (int t = 0; t < 200; ++t) {
        Rng sub = root.split(t);
        Graph g = random_gnp(4 + t % 8, 0.4, sub);
        auto part = greedy_independent_partition(g);
        CHECK(part.k() <= g.max_degree + 1);
        std::set<int> seen;
        for (const auto& cls : part.classes) {
            for (int v : cls) {
                CHECK(seen.insert(v).second);
                for (int u : cls)
                    if (u != v) CHECK(!g.has_edge(u, v));
            }
        }
        CHECK(static_cast<int>(seen.size()) == g.n);
    }
}

TEST_CASE("connected components in both modes") {
    // edge-induced, empty A: all singletons
    Graph p3 = path_graph(3);
    auto singletons = connected_components_edges(p3, {});
    CHECK(singletons.size() == 3);

    // vertex-induced on a path with the middle removed
    auto two = connected_components_vertex(p3, {0, 2});
    CHECK(two.size() == 2);

    // 4-cycle with two opposite edges
    Graph c4 = cycle_graph(4);
    int e02 = -1;
    std::vector<int> opposite;
    for (size_t e = 0; e < c4.edges.size(); ++e) {
        auto [u, v] = c4.edges[e];
        if ((u == 0 && v == 1) || (u == 2 && v == 3)) opposite.push_back(static_cast<int>(e));
    }
    (void)e02;
    auto comps = connected_components_edges(c4, opposite);
    CHECK(comps.size() == 2);
    CHECK(comps[0].size() == 2);
    CHECK(comps[1].size() == 2);

    // edge-induced components of all of E equal vertex components of V
    Rng root(5);
    for (int t = 0; t < 100; ++t) {
        Rng sub = root.split(t);
        Graph g = random_gnp(8, 0.2, sub);
        std::vector<int> all_edges(g.edges.size());
        for (size_t e = 0; e < g.edges.size(); ++e) all_edges[e] = static_cast<int>(e);
        std::vector<int> all_verts(g.n);
        for (int v = 0; v < g.n; ++v) all_verts[v] = v;
        CHECK(connected_components_edges(g, all_edges) ==
              connected_components_vertex(g, all_verts));
    }
}

TEST_CASE("ball by BFS") {
    Graph p5 = path_graph(5);
    CHECK(ball(p5, 2, 0) == std::vector<int>{2});
    CHECK(ball(p5, 2, 1).size() == 3);

    Graph g33 = grid_graph({3, 3});
    CHECK(ball(g33, 0, 2).size() == 6);
}

TEST_CASE("graph text format round trip") {
    Graph g = grid_graph({3, 3});
    std::stringstream ss;
    write_graph(ss, g);
    Graph back = read_graph(ss);
    CHECK(back.n == g.n);
    CHECK(back.edges == g.edges);

    std::stringstream bad("2");
    CHECK_THROWS(read_graph(bad));
}

TEST_CASE("graph generator specs") {
    CHECK(build_graph_spec("edge").n == 2);
    CHECK(build_graph_spec("path:5").edges.size() == 4);
    CHECK(build_graph_spec("grid:3x3").n == 9);
    CHECK(build_graph_spec("cycle:4").edges.size() == 4);
    CHECK(build_graph_spec("complete:5").edges.size() == 10);
    CHECK_THROWS(build_graph_spec("nonsense:1"));
}
