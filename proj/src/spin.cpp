#include "spinsi/spin.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace spinsi {

SpinOrder SpinOrder::natural(int n, int q) {
    SpinOrder o;
    o.order.assign(n, {});
    for (int v = 0; v < n; ++v) {
        o.order[v].resize(q);
        std::iota(o.order[v].begin(), o.order[v].end(), 0);
    }
    o.build_ranks();
    return o;
}

void SpinOrder::build_ranks() {
    rank_.assign(order.size(), {});
    for (size_t v = 0; v < order.size(); ++v) {
        rank_[v].assign(order[v].size(), 0);
        for (size_t r = 0; r < order[v].size(); ++r) rank_[v][order[v][r]] = static_cast<int>(r);
    }
}

double SpinSystem::log_weight(const std::vector<uint8_t>& sigma) const {
    double acc = 0.0;
    for (auto [u, v] : graph->edges) {
        double t = k_entry(sigma[u], sigma[v]);
        if (is_hard(t)) return kHardConstraint;
        acc += t;
    }
    for (int v = 0; v < n(); ++v) {
        double t = U[v][sigma[v]];
        if (is_hard(t)) return kHardConstraint;
        acc += t;
    }
    return acc;
}

double SpinSystem::hamiltonian(const std::vector<uint8_t>& sigma) const {
    if (static_cast<int>(sigma.size()) != n())
        throw std::invalid_argument("hamiltonian: configuration size mismatch");
    for (uint8_t s : sigma)
        if (s >= q) throw std::invalid_argument("hamiltonian: spin out of range");
    double lw = log_weight(sigma);
    return is_hard(lw) ? std::numeric_limits<double>::infinity() : -lw;
}

void SpinSystem::local_log_weights(const std::vector<uint8_t>& sigma, int v,
                                   std::vector<double>& out) const {
    out.assign(q, 0.0);
    for (int s = 0; s < q; ++s) {
        double acc = U[v][s];
        for (int u : graph->adjacency[v]) {
            double t = k_entry(s, sigma[u]);
            if (is_hard(t) || is_hard(acc)) {
                acc = kHardConstraint;
                break;
            }
            acc += t;
        }
        out[s] = acc;
    }
}

static SpinSystem blank_system(std::shared_ptr<const Graph> g, int q) {
    SpinSystem sys;
    sys.graph = std::move(g);
    sys.q = q;
    sys.K.assign(static_cast<size_t>(q) * q, 0.0);
    sys.U.assign(sys.graph->n, std::vector<double>(q, 0.0));
    return sys;
}

SpinSystem make_potts(std::shared_ptr<const Graph> g, int q, double beta) {
    if (q < 2) throw std::invalid_argument("make_potts: q >= 2 required");
    SpinSystem sys = blank_system(std::move(g), q);
    for (int a = 0; a < q; ++a) sys.set_k(a, a, beta);
    sys.kind = ModelKind::Potts;
    sys.param = beta;
    return sys;
}

SpinSystem make_ising(std::shared_ptr<const Graph> g, double beta) {
    SpinSystem sys = make_potts(std::move(g), 2, beta);
    sys.kind = ModelKind::Ising;
    return sys;
}

SpinSystem make_hardcore(std::shared_ptr<const Graph> g, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("make_hardcore: lambda > 0 required");
    SpinSystem sys = blank_system(std::move(g), 2);
    sys.set_k(1, 1, kHardConstraint);
    for (auto& u : sys.U) u[1] = std::log(lambda);
    sys.kind = ModelKind::Hardcore;
    sys.param = lambda;
    return sys;
}

SpinSystem make_model(const std::string& kind, std::shared_ptr<const Graph> g, double param,
                      int q) {
    if (kind == "ising") return make_ising(std::move(g), param);
    if (kind == "potts") return make_potts(std::move(g), q, param);
    if (kind == "hardcore") return make_hardcore(std::move(g), param);
    throw std::invalid_argument("make_model: unknown kind \"" + kind + "\"");
}

SpinSystem condition(const SpinSystem& sys, const Pinning& tau, std::vector<int>* vertex_map) {
    const Graph& g = *sys.graph;
    for (auto [v, s] : tau.assign) {
        if (v < 0 || v >= g.n) throw std::invalid_argument("condition: pinned vertex out of range");
        if (s < 0 || s >= sys.q) throw std::invalid_argument("condition: pinned spin out of range");
    }
    // a hard edge between two pinned vertices conditions on a null event
    for (auto [u, v] : g.edges)
        if (tau.pins(u) && tau.pins(v) && is_hard(sys.k_entry(tau.spin(u), tau.spin(v))))
            throw std::invalid_argument("condition: pinning has empty conditional support");
    std::vector<int> new_index(g.n, -1);
    std::vector<int> keep;
    for (int v = 0; v < g.n; ++v)
        if (!tau.pins(v)) {
            new_index[v] = static_cast<int>(keep.size());
            keep.push_back(v);
        }
    std::vector<std::pair<int, int>> edges;
    for (auto [u, v] : g.edges)
        if (new_index[u] >= 0 && new_index[v] >= 0)
            edges.emplace_back(new_index[u], new_index[v]);
    auto sub = std::make_shared<Graph>(build_graph(static_cast<int>(keep.size()), edges));

    SpinSystem out = blank_system(sub, sys.q);
    out.K = sys.K;
    out.kind = sys.kind;
    out.param = sys.param;
    out.folded_boundary = tau;
    for (int v : keep) {
        auto& field = out.U[new_index[v]];
        field = sys.U[v];
        for (int u : g.adjacency[v]) {
            if (!tau.pins(u)) continue;
            int s_pin = tau.spin(u);
            for (int s = 0; s < sys.q; ++s) {
                double t = sys.k_entry(s, s_pin);
                field[s] = (is_hard(field[s]) || is_hard(t)) ? kHardConstraint : field[s] + t;
            }
        }
        bool any_spin_left = false;
        for (int s = 0; s < sys.q; ++s)
            if (!is_hard(field[s])) any_spin_left = true;
        if (!any_spin_left)
            throw std::invalid_argument("condition: pinning has empty conditional support");
    }
    if (vertex_map) *vertex_map = keep;
    return out;
}

double uniqueness_threshold(const std::string& kind, int max_degree) {
    if (max_degree < 3) throw std::invalid_argument("uniqueness_threshold: degree >= 3 required");
    double d = max_degree;
    if (kind == "ising") return std::log(d / (d - 2.0));
    if (kind == "hardcore") return std::pow(d - 1.0, d - 1.0) / std::pow(d - 2.0, d);
    throw std::invalid_argument("uniqueness_threshold: unknown kind \"" + kind + "\"");
}

}  // namespace spinsi
