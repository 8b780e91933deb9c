#include "spinsi/graph.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace spinsi {

bool Graph::has_edge(int u, int v) const {
    const auto& nb = adjacency[u];
    return std::binary_search(nb.begin(), nb.end(), v);
}

UnionFind::UnionFind(int n) : parent_(n), size_(n, 1), count_(n) {
    for (int i = 0; i < n; ++i) parent_[i] = i;
}

int UnionFind::find(int x) {
    int root = x;
    while (parent_[root] != root) root = parent_[root];
    while (parent_[x] != root) {
        int next = parent_[x];
        parent_[x] = root;
        x = next;
    }
    return root;
}

void UnionFind::unite(int x, int y) {
    int a = find(x), b = find(y);
    if (a == b) return;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    --count_;
}

Graph build_graph(int n, const std::vector<std::pair<int, int>>& edge_list) {
    if (n < 0) throw std::invalid_argument("build_graph: negative vertex count");
    Graph g;
    g.n = n;
    g.adjacency.assign(n, {});
    std::set<std::pair<int, int>> seen;
    for (auto [u, v] : edge_list) {
        if (u < 0 || u >= n || v < 0 || v >= n)
            throw std::invalid_argument("build_graph: endpoint out of range");
        if (u == v) throw std::invalid_argument("build_graph: self-loop");
        auto e = std::minmax(u, v);
        if (!seen.insert({e.first, e.second}).second)
            throw std::invalid_argument("build_graph: duplicate edge");
        g.edges.emplace_back(e.first, e.second);
        g.adjacency[u].push_back(v);
        g.adjacency[v].push_back(u);
    }
    for (auto& nb : g.adjacency) std::sort(nb.begin(), nb.end());
    g.max_degree = 0;
    for (int v = 0; v < n; ++v) g.max_degree = std::max(g.max_degree, g.degree(v));
    return g;
}

Graph grid_graph(const std::vector<int>& dims) {
    if (dims.empty()) throw std::invalid_argument("grid_graph: empty dims");
    long n = 1;
    for (int d : dims) {
        if (d < 1) throw std::invalid_argument("grid_graph: side length < 1");
        n *= d;
    }
    // row-major: last dimension varies fastest
    std::vector<long> stride(dims.size(), 1);
    for (int i = static_cast<int>(dims.size()) - 2; i >= 0; --i)
        stride[i] = stride[i + 1] * dims[i + 1];
    std::vector<std::pair<int, int>> edges;
    for (long idx = 0; idx < n; ++idx) {
        long rem = idx;
        for (size_t a = 0; a < dims.size(); ++a) {
            long coord = rem / stride[a];
            rem %= stride[a];
            if (coord + 1 < dims[a])
                edges.emplace_back(static_cast<int>(idx), static_cast<int>(idx + stride[a]));
        }
    }
    Graph g = build_graph(static_cast<int>(n), edges);
    g.grid_dims = dims;
    return g;
}

Graph path_graph(int n) { return grid_graph({n}); }

Graph cycle_graph(int n) {
    if (n < 3) throw std::invalid_argument("cycle_graph: need n >= 3");
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
    return build_graph(n, edges);
}

Graph complete_graph(int n) {
    std::vector<std::pair<int, int>> edges;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) edges.emplace_back(u, v);
    return build_graph(n, edges);
}

Graph single_edge_graph() { return build_graph(2, {{0, 1}}); }

Graph random_gnp(int n, double p, Rng& rng) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("random_gnp: p outside [0,1]");
    std::vector<std::pair<int, int>> edges;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            if (rng.bernoulli(p)) edges.emplace_back(u, v);
    return build_graph(n, edges);
}

IndependentPartition greedy_independent_partition(const Graph& g) {
    IndependentPartition part;
    std::vector<int> color(g.n, -1);
    for (int v = 0; v < g.n; ++v) {
        std::vector<bool> used(part.classes.size() + 1, false);
        for (int u : g.adjacency[v])
            if (u < v) used[color[u]] = true;
        int c = 0;
        while (c < static_cast<int>(used.size()) && used[c]) ++c;
        if (c == static_cast<int>(part.classes.size())) part.classes.emplace_back();
        color[v] = c;
        part.classes[c].push_back(v);
    }
    if (part.classes.empty()) part.classes.emplace_back();  // empty graph: one (empty) class
    return part;
}

std::vector<std::vector<int>> connected_components_vertex(const Graph& g,
                                                          const std::vector<int>& subset) {
    std::vector<char> in(g.n, 0);
    for (int v : subset) in[v] = 1;
    UnionFind uf(g.n);
    for (auto [u, v] : g.edges)
        if (in[u] && in[v]) uf.unite(u, v);
    std::vector<std::vector<int>> comps;
    std::vector<int> root_to_comp(g.n, -1);
    std::vector<int> sorted(subset);
    std::sort(sorted.begin(), sorted.end());
    for (int v : sorted) {
        int r = uf.find(v);
        if (root_to_comp[r] < 0) {
            root_to_comp[r] = static_cast<int>(comps.size());
            comps.emplace_back();
        }
        comps[root_to_comp[r]].push_back(v);
    }
    return comps;
}

std::vector<std::vector<int>> connected_components_edges(const Graph& g,
                                                         const std::vector<int>& edge_subset) {
    UnionFind uf(g.n);
    for (int e : edge_subset) {
        auto [u, v] = g.edges.at(e);
        uf.unite(u, v);
    }
    std::vector<std::vector<int>> comps;
    std::vector<int> root_to_comp(g.n, -1);
    for (int v = 0; v < g.n; ++v) {
        int r = uf.find(v);
        if (root_to_comp[r] < 0) {
            root_to_comp[r] = static_cast<int>(comps.size());
            comps.emplace_back();
        }
        comps[root_to_comp[r]].push_back(v);
    }
    return comps;
}

std::vector<int> bfs_distances(const Graph& g, int source) {
    std::vector<int> dist(g.n, -1);
    std::deque<int> queue{source};
    dist[source] = 0;
    while (!queue.empty()) {
        int v = queue.front();
        queue.pop_front();
        for (int u : g.adjacency[v])
            if (dist[u] < 0) {
                dist[u] = dist[v] + 1;
                queue.push_back(u);
            }
    }
    return dist;
}

std::vector<int> ball(const Graph& g, int center, int radius) {
    if (center < 0 || center >= g.n) throw std::invalid_argument("ball: center out of range");
    if (radius < 0) throw std::invalid_argument("ball: negative radius");
    auto dist = bfs_distances(g, center);
    std::vector<int> out;
    for (int v = 0; v < g.n; ++v)
        if (dist[v] >= 0 && dist[v] <= radius) out.push_back(v);
    return out;
}

bool is_bipartite(const Graph& g, std::vector<int>* side) {
    std::vector<int> color(g.n, -1);
    for (int s = 0; s < g.n; ++s) {
        if (color[s] >= 0) continue;
        color[s] = 0;
        std::deque<int> queue{s};
        while (!queue.empty()) {
            int v = queue.front();
            queue.pop_front();
            for (int u : g.adjacency[v]) {
                if (color[u] < 0) {
                    color[u] = 1 - color[v];
                    queue.push_back(u);
                } else if (color[u] == color[v]) {
                    return false;
                }
            }
        }
    }
    if (side) *side = color;
    return true;
}

Graph read_graph(std::istream& in) {
    int n = 0;
    long m = 0;
    if (!(in >> n >> m)) throw std::runtime_error("graph file: missing header \"n m\"");
    std::vector<std::pair<int, int>> edges;
    for (long i = 0; i < m; ++i) {
        int u, v;
        if (!(in >> u >> v)) throw std::runtime_error("graph file: truncated edge list");
        edges.emplace_back(u, v);
    }
    return build_graph(n, edges);
}

Graph read_graph_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open graph file: " + path);
    return read_graph(in);
}

void write_graph(std::ostream& out, const Graph& g) {
    out << g.n << " " << g.edges.size() << "\n";
    for (auto [u, v] : g.edges) out << u << " " << v << "\n";
}

}  // namespace spinsi
