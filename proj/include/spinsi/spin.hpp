#pragma once

#include <limits>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "spinsi/graph.hpp"

namespace spinsi {

// Hard-constraint sentinel in log-weight space: forbidden local terms carry
// weight exactly zero, never a tiny positive number.
constexpr double kHardConstraint = -std::numeric_limits<double>::infinity();

inline bool is_hard(double log_term) { return log_term == kHardConstraint; }

enum class ModelKind { Ising, Potts, Hardcore, Custom };

// Partial spin assignment on a vertex subset.
struct Pinning {
    std::map<int, int> assign;  // vertex -> spin

    bool empty() const { return assign.empty(); }
    size_t size() const { return assign.size(); }
    bool pins(int v) const { return assign.count(v) > 0; }
    int spin(int v) const { return assign.at(v); }
    void set(int v, int s) { assign[v] = s; }
};

// Per-vertex linear order of spins; order[v][rank] = spin.
struct SpinOrder {
    std::vector<std::vector<int>> order;

    static SpinOrder natural(int n, int q);
    // rank of spin s at vertex v (0 = bottom)
    int rank(int v, int s) const { return rank_[v][s]; }
    int top(int v) const { return order[v].back(); }
    int bottom(int v) const { return order[v].front(); }
    void build_ranks();

  private:
    std::vector<std::vector<int>> rank_;
};

// General pairwise spin system: symmetric edge potential K (log-weight
// contribution, -inf = hard constraint), per-vertex spin potential U.
// A configuration sigma has log-weight
//     sum_{(u,v) in E} K(sigma_u, sigma_v) + sum_v U[v][sigma_v],
// i.e. weight exp(-H) with H the negated sum. Boundary pinnings are folded
// into U at construction time (one code path for pinnings and boundaries);
// `folded_boundary` records what was folded.
struct SpinSystem {
    std::shared_ptr<const Graph> graph;
    int q = 2;
    std::vector<double> K;                   // q*q, row-major, symmetric
    std::vector<std::vector<double>> U;      // per vertex, size q
    ModelKind kind = ModelKind::Custom;
    double param = 0.0;                      // beta for ising/potts, lambda for hardcore
    Pinning folded_boundary;

    int n() const { return graph->n; }
    double k_entry(int a, int b) const { return K[a * q + b]; }
    void set_k(int a, int b, double val) { K[a * q + b] = val; K[b * q + a] = val; }

    // log-weight of a full configuration (kHardConstraint if forbidden)
    double log_weight(const std::vector<uint8_t>& sigma) const;
    // Hamiltonian: +inf exactly on zero-weight configurations
    double hamiltonian(const std::vector<uint8_t>& sigma) const;

    // log-weights of the spins of one vertex given the rest of sigma
    void local_log_weights(const std::vector<uint8_t>& sigma, int v,
                           std::vector<double>& out) const;
};

SpinSystem make_ising(std::shared_ptr<const Graph> g, double beta);
SpinSystem make_potts(std::shared_ptr<const Graph> g, int q, double beta);
SpinSystem make_hardcore(std::shared_ptr<const Graph> g, double lambda);
SpinSystem make_model(const std::string& kind, std::shared_ptr<const Graph> g, double param,
                      int q = 2);

// System on the unpinned vertices whose Gibbs distribution equals the
// conditional of `sys` given tau; pinned vertices fold into neighbor fields.
// `vertex_map` (optional out) maps new index -> original index.
SpinSystem condition(const SpinSystem& sys, const Pinning& tau,
                     std::vector<int>* vertex_map = nullptr);

// ising -> ln(D/(D-2)); hardcore -> (D-1)^(D-1)/(D-2)^D; requires D >= 3.
double uniqueness_threshold(const std::string& kind, int max_degree);

}  // namespace spinsi
