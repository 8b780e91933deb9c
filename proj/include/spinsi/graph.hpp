#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "spinsi/rng.hpp"

namespace spinsi {

// Undirected simple graph over dense vertex indices [0, n).
// Immutable after construction; safe to share across threads.
struct Graph {
    int n = 0;
    std::vector<std::vector<int>> adjacency;     // sorted neighbor lists
    std::vector<std::pair<int, int>> edges;      // unordered pairs, u < v
    int max_degree = 0;
    std::vector<int> grid_dims;                  // nonempty iff built by grid_graph

    int degree(int v) const { return static_cast<int>(adjacency[v].size()); }
    bool has_edge(int u, int v) const;
    bool is_grid() const { return !grid_dims.empty(); }
};

// Disjoint independent vertex classes covering V.
struct IndependentPartition {
    std::vector<std::vector<int>> classes;
    int k() const { return static_cast<int>(classes.size()); }
};

// Weighted quick-union with path compression.
class UnionFind {
  public:
    explicit UnionFind(int n);
    int find(int x);
    void unite(int x, int y);
    bool connected(int x, int y) { return find(x) == find(y); }
    int count() const { return count_; }

  private:
    std::vector<int> parent_;
    std::vector<int> size_;
    int count_;
};

Graph build_graph(int n, const std::vector<std::pair<int, int>>& edge_list);
Graph grid_graph(const std::vector<int>& dims);
Graph path_graph(int n);
Graph cycle_graph(int n);
Graph complete_graph(int n);
Graph single_edge_graph();
Graph random_gnp(int n, double p, Rng& rng);

// First-fit coloring by vertex index; k <= max_degree + 1.
IndependentPartition greedy_independent_partition(const Graph& g);

// Components of the subgraph induced by a vertex subset.
std::vector<std::vector<int>> connected_components_vertex(const Graph& g,
                                                          const std::vector<int>& subset);

// Components of (V, A) for an edge subset A; isolated vertices are singletons.
std::vector<std::vector<int>> connected_components_edges(const Graph& g,
                                                         const std::vector<int>& edge_subset);

// Vertices at graph distance <= radius from center.
std::vector<int> ball(const Graph& g, int center, int radius);

// BFS distances from source (-1 where unreachable).
std::vector<int> bfs_distances(const Graph& g, int source);

bool is_bipartite(const Graph& g, std::vector<int>* side = nullptr);

// Text format: first line "n m", then m lines "u v".
Graph read_graph(std::istream& in);
Graph read_graph_file(const std::string& path);
void write_graph(std::ostream& out, const Graph& g);

}  // namespace spinsi
