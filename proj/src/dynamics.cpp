#include "spinsi/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace spinsi {

ScanOrder ScanOrder::identity(int n) {
    ScanOrder phi;
    phi.order.resize(n);
    std::iota(phi.order.begin(), phi.order.end(), 0);
    return phi;
}

bool ScanOrder::valid(int n) const {
    if (static_cast<int>(order.size()) != n) return false;
    std::vector<char> seen(n, 0);
    for (int v : order) {
        if (v < 0 || v >= n || seen[v]) return false;
        seen[v] = 1;
    }
    return true;
}

BlockSpec BlockSpec::singletons(int n) {
    BlockSpec spec;
    for (int v = 0; v < n; ++v) {
        spec.blocks.push_back({v});
        spec.weights.push_back(1.0 / n);
    }
    return spec;
}

BlockSpec BlockSpec::from_partition(const IndependentPartition& part) {
    BlockSpec spec;
    for (const auto& cls : part.classes) {
        spec.blocks.push_back(cls);
        spec.weights.push_back(1.0 / part.k());
    }
    return spec;
}

void BlockSpec::validate(int n) const {
    if (blocks.size() != weights.size() || blocks.empty())
        throw std::invalid_argument("BlockSpec: blocks/weights mismatch");
    double total = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw std::invalid_argument("BlockSpec: negative weight");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw std::invalid_argument("BlockSpec: weights must sum to 1");
    std::vector<char> covered(n, 0);
    for (const auto& b : blocks)
        for (int v : b) {
            if (v < 0 || v >= n) throw std::invalid_argument("BlockSpec: vertex out of range");
            covered[v] = 1;
        }
    for (int v = 0; v < n; ++v)
        if (!covered[v]) throw std::invalid_argument("BlockSpec: blocks do not cover V");
    if (alpha_min(n) <= 0.0) throw std::invalid_argument("BlockSpec: alpha_min must be positive");
}

double BlockSpec::alpha_min(int n) const {
    std::vector<double> cover(n, 0.0);
    for (size_t i = 0; i < blocks.size(); ++i)
        for (int v : blocks[i]) cover[v] += weights[i];
    return *std::min_element(cover.begin(), cover.end());
}

void site_conditional(const SpinSystem& sys, const std::vector<uint8_t>& sigma, int v,
                      const SpinOrder* order, std::vector<double>& w) {
    const int q = sys.q;
    thread_local std::vector<double> logw;
    sys.local_log_weights(sigma, v, logw);
    w.assign(q, 0.0);
    double best = kHardConstraint;
    for (int s = 0; s < q; ++s)
        if (!is_hard(logw[s]) && (is_hard(best) || logw[s] > best)) best = logw[s];
    if (is_hard(best))
        throw std::runtime_error("site_conditional: empty conditional support");
    double z = 0.0;
    for (int r = 0; r < q; ++r) {
        int s = order ? order->order[v][r] : r;
        w[r] = is_hard(logw[s]) ? 0.0 : std::exp(logw[s] - best);
        z += w[r];
    }
    for (int r = 0; r < q; ++r) w[r] /= z;
}

int pick_by_cdf(const std::vector<double>& w, double u01) {
    double cdf = 0.0;
    for (size_t r = 0; r + 1 < w.size(); ++r) {
        cdf += w[r];
        if (u01 <= cdf) return static_cast<int>(r);
    }
    return static_cast<int>(w.size()) - 1;
}

void update_site(const SpinSystem& sys, std::vector<uint8_t>& sigma, int v, double u01,
                 const SpinOrder* order) {
    thread_local std::vector<double> w;
    site_conditional(sys, sigma, v, order, w);
    int r = pick_by_cdf(w, u01);
    sigma[v] = static_cast<uint8_t>(order ? order->order[v][r] : r);
}

namespace {

// Inverse-CDF sample over region assignments enumerated in mixed radix with
// spins ranked by `order` (natural order when null). Single-vertex regions
// with a declared order give the standard monotone coupling construction.
void sample_region(const SpinSystem& sys, std::vector<uint8_t>& sigma,
                   const std::vector<int>& region, Rng& rng, const SpinOrder* order,
                   uint64_t cap_states) {
    const int q = sys.q;
    const int m = static_cast<int>(region.size());
    if (m == 0) return;
    if (m == 1) {
        update_site(sys, sigma, region[0], rng.uniform01(), order);
        return;
    }
    uint64_t total = 1;
    for (int i = 0; i < m; ++i) {
        total *= static_cast<uint64_t>(q);
        if (total > cap_states)
            throw std::runtime_error("heat_bath_update: region conditional exceeds cap");
    }
    std::vector<char> in_region(sys.n(), 0);
    for (int v : region) in_region[v] = 1;

    std::vector<double> logw(total);
    double best = kHardConstraint;
    std::vector<int> assign(m, 0);
    for (uint64_t code = 0; code < total; ++code) {
        uint64_t rem = code;
        for (int i = 0; i < m; ++i) {
            int rank = static_cast<int>(rem % q);
            rem /= q;
            assign[i] = order ? order->order[region[i]][rank] : rank;
        }
        double acc = 0.0;
        for (int i = 0; i < m && !is_hard(acc); ++i) {
            int v = region[i];
            int s = assign[i];
            double t = sys.U[v][s];
            acc = is_hard(t) ? kHardConstraint : acc + t;
            for (int u : sys.graph->adjacency[v]) {
                if (is_hard(acc)) break;
                double k;
                if (in_region[u]) {
                    // count internal edges once, from the lower region slot
                    if (u < v) continue;
                    int ui = static_cast<int>(std::find(region.begin(), region.end(), u) -
                                              region.begin());
                    k = sys.k_entry(s, assign[ui]);
                } else {
                    k = sys.k_entry(s, sigma[u]);
                }
                acc = is_hard(k) ? kHardConstraint : acc + k;
            }
        }
        logw[code] = acc;
        if (!is_hard(acc) && (is_hard(best) || acc > best)) best = acc;
    }
    if (is_hard(best)) throw std::runtime_error("heat_bath_update: empty conditional support");
    double z = 0.0;
    for (uint64_t code = 0; code < total; ++code)
        if (!is_hard(logw[code])) z += std::exp(logw[code] - best);
    const double u01 = rng.uniform01();
    double cdf = 0.0;
    uint64_t chosen = total - 1;
    for (uint64_t code = 0; code < total; ++code) {
        if (is_hard(logw[code])) continue;
        cdf += std::exp(logw[code] - best) / z;
        if (u01 <= cdf) {
            chosen = code;
            break;
        }
    }
    uint64_t rem = chosen;
    for (int i = 0; i < m; ++i) {
        int rank = static_cast<int>(rem % q);
        rem /= q;
        sigma[region[i]] = static_cast<uint8_t>(order ? order->order[region[i]][rank] : rank);
    }
}

}  // namespace

ChainState heat_bath_update(const SpinSystem& sys, const ChainState& state,
                            const std::vector<int>& region, Rng& rng, const SpinOrder* order,
                            uint64_t cap_states) {
    ChainState next = state;
    sample_region(sys, next.config, region, rng, order, cap_states);
    next.step_count = state.step_count + 1;
    return next;
}

ChainState glauber_step(const SpinSystem& sys, const ChainState& state, Rng& rng) {
    int v = rng.uniform_int(sys.n());
    ChainState next = state;
    sample_region(sys, next.config, {v}, rng, nullptr, kDefaultStateCap);
    next.step_count = state.step_count + 1;
    return next;
}

ChainState scan_step(const SpinSystem& sys, const ChainState& state, const ScanOrder& phi,
                     Rng& rng) {
    if (!phi.valid(sys.n())) throw std::invalid_argument("scan_step: invalid order");
    ChainState next = state;
    for (int i = 0; i < sys.n(); ++i)
        sample_region(sys, next.config, {phi.order[i]}, rng, nullptr, kDefaultStateCap);
    for (int i = sys.n() - 1; i >= 0; --i)
        sample_region(sys, next.config, {phi.order[i]}, rng, nullptr, kDefaultStateCap);
    next.step_count = state.step_count + 1;
    return next;
}

ChainState scan_step_oneway(const SpinSystem& sys, const ChainState& state, const ScanOrder& phi,
                            Rng& rng) {
    if (!phi.valid(sys.n())) throw std::invalid_argument("scan_step_oneway: invalid order");
    ChainState next = state;
    for (int i = 0; i < sys.n(); ++i)
        sample_region(sys, next.config, {phi.order[i]}, rng, nullptr, kDefaultStateCap);
    next.step_count = state.step_count + 1;
    return next;
}

ChainState even_odd_scan_step(const SpinSystem& sys, const ChainState& state,
                              const std::vector<int>& evens, const std::vector<int>& odds,
                              Rng& rng, bool literal_four_sweeps) {
    std::vector<char> side(sys.n(), -1);
    for (int v : evens) side[v] = 0;
    for (int v : odds) side[v] = 1;
    for (int v = 0; v < sys.n(); ++v)
        if (side[v] < 0)
            throw std::invalid_argument("even_odd_scan_step: classes do not cover V");
    for (auto [u, v] : sys.graph->edges)
        if (side[u] == side[v])
            throw std::invalid_argument("even_odd_scan_step: classes are not a bipartition");
    ChainState next = state;
    auto sweep = [&](const std::vector<int>& cls) {
        for (int v : cls) sample_region(sys, next.config, {v}, rng, nullptr, kDefaultStateCap);
    };
    sweep(evens);
    sweep(odds);
    if (literal_four_sweeps) sweep(odds);
    sweep(evens);
    next.step_count = state.step_count + 1;
    return next;
}

ChainState block_step(const SpinSystem& sys, const ChainState& state, const BlockSpec& spec,
                      Rng& rng, uint64_t cap_states) {
    double u = rng.uniform01();
    double cdf = 0.0;
    size_t chosen = spec.blocks.size() - 1;
    for (size_t i = 0; i < spec.blocks.size(); ++i) {
        cdf += spec.weights[i];
        if (u <= cdf) {
            chosen = i;
            break;
        }
    }
    ChainState next = state;
    sample_region(sys, next.config, spec.blocks[chosen], rng, nullptr, cap_states);
    next.step_count = state.step_count + 1;
    return next;
}

void require_sw_applicable(const SpinSystem& sys) {
    if (sys.kind != ModelKind::Ising && sys.kind != ModelKind::Potts)
        throw std::invalid_argument("sw_step: system is not a ferromagnetic Potts model");
    if (sys.param < 0.0) throw std::invalid_argument("sw_step: beta must be >= 0");
    if (!sys.folded_boundary.empty())
        throw std::invalid_argument("sw_step: boundary pinning not supported");
    for (const auto& u : sys.U)
        for (double t : u)
            if (t != 0.0) throw std::invalid_argument("sw_step: vertex potentials not supported");
}

double sw_percolation_probability(const SpinSystem& sys) {
    return 1.0 - std::exp(-sys.param);
}

JointState es_sample_edges(const SpinSystem& sys, const std::vector<uint8_t>& sigma, Rng& rng) {
    require_sw_applicable(sys);
    const double p = sw_percolation_probability(sys);
    JointState joint;
    joint.spins = sigma;
    const auto& edges = sys.graph->edges;
    for (size_t e = 0; e < edges.size(); ++e) {
        auto [u, v] = edges[e];
        if (sigma[u] == sigma[v] && rng.bernoulli(p)) joint.edges.push_back(static_cast<int>(e));
    }
    return joint;
}

JointState es_sample_spins(const SpinSystem& sys, const std::vector<int>& edge_subset, Rng& rng) {
    auto comps = connected_components_edges(*sys.graph, edge_subset);
    JointState joint;
    joint.spins.assign(sys.n(), 0);
    joint.edges = edge_subset;
    for (const auto& comp : comps) {
        uint8_t s = static_cast<uint8_t>(rng.uniform_int(sys.q));
        for (int v : comp) joint.spins[v] = s;
    }
    return joint;
}

ChainState sw_step(const SpinSystem& sys, const ChainState& state, Rng& rng) {
    require_sw_applicable(sys);
    JointState joint = es_sample_edges(sys, state.config, rng);
    JointState next_joint = es_sample_spins(sys, joint.edges, rng);
    // invariant: new spins constant on each percolation component
    for (int e : joint.edges) {
        auto [u, v] = sys.graph->edges[e];
        if (next_joint.spins[u] != next_joint.spins[v])
            throw std::logic_error("sw_step: retained edge left non-monochromatic");
    }
    ChainState next;
    next.config = next_joint.spins;
    next.step_count = state.step_count + 1;
    return next;
}

ChainState random_state(const SpinSystem& sys, Rng& rng) {
    ChainState st;
    st.config.resize(sys.n());
    // rejection from the product-uniform measure onto the support
    for (int attempt = 0; attempt < 100000; ++attempt) {
        for (int v = 0; v < sys.n(); ++v)
            st.config[v] = static_cast<uint8_t>(rng.uniform_int(sys.q));
        if (!is_hard(sys.log_weight(st.config))) return st;
    }
    throw std::runtime_error("random_state: could not hit the support");
}

ChainState constant_state(const SpinSystem& sys, int spin) {
    ChainState st;
    st.config.assign(sys.n(), static_cast<uint8_t>(spin));
    return st;
}

}  // namespace spinsi
