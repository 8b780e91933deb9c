#include "spinsi/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "spinsi/poset.hpp"

namespace spinsi {

StateSpace::StateSpace(int n_, int q_) : n(n_), q(q_), pow(n_ + 1) {
    uint64_t p = 1;
    for (int v = 0; v <= n; ++v) {
        pow[v] = static_cast<uint32_t>(p);
        p *= static_cast<uint64_t>(q);
    }
}

uint64_t StateSpace::size() const {
    uint64_t p = 1;
    for (int v = 0; v < n; ++v) p *= static_cast<uint64_t>(q);
    return p;
}

uint32_t StateSpace::encode(const std::vector<uint8_t>& sigma) const {
    uint32_t code = 0;
    for (int v = 0; v < n; ++v) code += static_cast<uint32_t>(sigma[v]) * pow[v];
    return code;
}

std::vector<uint8_t> StateSpace::decode(uint32_t code) const {
    std::vector<uint8_t> sigma(n);
    for (int v = 0; v < n; ++v) {
        sigma[v] = static_cast<uint8_t>(code % q);
        code /= q;
    }
    return sigma;
}

void GibbsTable::build_index() {
    index_.clear();
    index_.reserve(states.size() * 2);
    for (int i = 0; i < size(); ++i) index_.emplace(states[i], i);
}

int GibbsTable::row_of(uint32_t code) const {
    auto it = index_.find(code);
    return it == index_.end() ? -1 : it->second;
}

double GibbsTable::prob_of(uint32_t code) const {
    int r = row_of(code);
    return r < 0 ? 0.0 : probs[r];
}

GibbsTable exact_gibbs(const SpinSystem& sys, uint64_t cap_states) {
    StateSpace space(sys.n(), sys.q);
    if (space.size() > cap_states)
        throw std::runtime_error("exact_gibbs: state space exceeds cap (" +
                                 std::to_string(space.size()) + " > " +
                                 std::to_string(cap_states) + "); use samplers instead");
    GibbsTable tbl;
    tbl.space = space;
    std::vector<double> logw;
    const uint64_t total = space.size();
    for (uint64_t code = 0; code < total; ++code) {
        double lw = sys.log_weight(space.decode(static_cast<uint32_t>(code)));
        if (!is_hard(lw)) {
            tbl.states.push_back(static_cast<uint32_t>(code));
            logw.push_back(lw);
        }
    }
    if (tbl.states.empty()) throw std::runtime_error("exact_gibbs: empty support");
    double m = *std::max_element(logw.begin(), logw.end());
    double z = 0.0;
    for (double lw : logw) z += std::exp(lw - m);
    tbl.log_z = m + std::log(z);
    tbl.probs.resize(logw.size());
    for (size_t i = 0; i < logw.size(); ++i) tbl.probs[i] = std::exp(logw[i] - tbl.log_z);
    tbl.build_index();
    return tbl;
}

std::map<std::vector<int>, double> marginal(const GibbsTable& tbl, const std::vector<int>& verts) {
    std::map<std::vector<int>, double> out;
    std::vector<int> key(verts.size());
    for (int i = 0; i < tbl.size(); ++i) {
        for (size_t j = 0; j < verts.size(); ++j) key[j] = tbl.space.spin_of(tbl.states[i], verts[j]);
        out[key] += tbl.probs[i];
    }
    return out;
}

GibbsTable condition_table(const GibbsTable& tbl, const Pinning& tau) {
    GibbsTable out;
    out.space = tbl.space;
    double total = 0.0;
    for (int i = 0; i < tbl.size(); ++i) {
        uint32_t code = tbl.states[i];
        bool match = true;
        for (auto [v, s] : tau.assign)
            if (tbl.space.spin_of(code, v) != s) {
                match = false;
                break;
            }
        if (match) {
            out.states.push_back(code);
            out.probs.push_back(tbl.probs[i]);
            total += tbl.probs[i];
        }
    }
    if (out.states.empty())
        throw std::runtime_error("condition_table: pinning has empty conditional support");
    for (double& p : out.probs) p /= total;
    out.log_z = tbl.log_z + std::log(total);
    out.build_index();
    return out;
}

std::vector<std::vector<double>> single_marginals(const GibbsTable& tbl) {
    std::vector<std::vector<double>> p(tbl.space.n, std::vector<double>(tbl.space.q, 0.0));
    for (int i = 0; i < tbl.size(); ++i)
        for (int v = 0; v < tbl.space.n; ++v)
            p[v][tbl.space.spin_of(tbl.states[i], v)] += tbl.probs[i];
    return p;
}

std::vector<VertexSpin> consistent_pairs(const GibbsTable& tbl, const Pinning& tau) {
    auto p = single_marginals(tbl);
    std::vector<VertexSpin> pairs;
    for (int v = 0; v < tbl.space.n; ++v) {
        if (tau.pins(v)) continue;
        for (int s = 0; s < tbl.space.q; ++s)
            if (p[v][s] > 0.0) pairs.push_back({v, s});
    }
    return pairs;
}

void for_each_pinning(const GibbsTable& full, int max_pinned, int min_free,
                      const std::function<void(const Pinning&)>& visit) {
    const int n = full.space.n;
    max_pinned = std::min(max_pinned, n - min_free);
    for (uint32_t mask = 0; mask < (1u << n); ++mask) {
        int k = __builtin_popcount(mask);
        if (k > max_pinned) continue;
        std::vector<int> verts;
        for (int v = 0; v < n; ++v)
            if (mask & (1u << v)) verts.push_back(v);
        // consistent pinnings on Lambda are exactly the support restrictions
        std::set<std::vector<int>> taus;
        std::vector<int> key(verts.size());
        for (int i = 0; i < full.size(); ++i) {
            for (size_t j = 0; j < verts.size(); ++j)
                key[j] = full.space.spin_of(full.states[i], verts[j]);
            taus.insert(key);
        }
        for (const auto& t : taus) {
            Pinning tau;
            for (size_t j = 0; j < verts.size(); ++j) tau.set(verts[j], t[j]);
            visit(tau);
        }
    }
}

MarginalBound marginal_lower_bound(const SpinSystem& sys, uint64_t cap_states) {
    GibbsTable full = exact_gibbs(sys, cap_states);
    MarginalBound best;
    best.b = 1.0;
    for_each_pinning(full, sys.n() - 1, 1, [&](const Pinning& tau) {
        GibbsTable slice = tau.empty() ? full : condition_table(full, tau);
        auto p = single_marginals(slice);
        for (int v = 0; v < sys.n(); ++v) {
            if (tau.pins(v)) continue;
            for (int s = 0; s < sys.q; ++s) {
                if (p[v][s] > 0.0 && p[v][s] < best.b) {
                    best.b = p[v][s];
                    best.witness_pinning = tau;
                    best.witness_vertex = v;
                    best.witness_spin = s;
                }
            }
        }
    });
    return best;
}

bool is_totally_connected(const SpinSystem& sys, uint64_t cap_states) {
    GibbsTable full = exact_gibbs(sys, cap_states);
    const int n = sys.n();
    bool connected = true;
    for_each_pinning(full, n - 1, 1, [&](const Pinning& tau) {
        if (!connected) return;
        GibbsTable slice = tau.empty() ? full : condition_table(full, tau);
        const int m = slice.size();
        if (m <= 1) return;
        UnionFind uf(m);
        for (int i = 0; i < m; ++i) {
            uint32_t code = slice.states[i];
            for (int v = 0; v < n; ++v) {
                if (tau.pins(v)) continue;
                int cur = slice.space.spin_of(code, v);
                for (int s = 0; s < sys.q; ++s) {
                    if (s == cur) continue;
                    int j = slice.row_of(slice.space.with_spin(code, v, s));
                    if (j >= 0) uf.unite(i, j);
                }
            }
        }
        if (uf.count() != 1) connected = false;
    });
    return connected;
}

namespace {

// Strict comparison of partial configurations under per-vertex spin orders.
// Returns +1 if a >= b, -1 if a <= b (0 possible for both when equal),
// 2 when incomparable.
int compare_partial(const std::vector<int>& verts, const std::vector<int>& a,
                    const std::vector<int>& b, const SpinOrder& order) {
    bool ge = true, le = true;
    for (size_t j = 0; j < verts.size(); ++j) {
        int ra = order.rank(verts[j], a[j]);
        int rb = order.rank(verts[j], b[j]);
        if (ra < rb) ge = false;
        if (ra > rb) le = false;
    }
    if (ge) return 1;
    if (le) return -1;
    return 2;
}

}  // namespace

bool is_monotone(const SpinSystem& sys, const SpinOrder& order, uint64_t cap_states,
                 size_t up_set_cap) {
    GibbsTable full = exact_gibbs(sys, cap_states);
    const int n = sys.n();
    bool monotone = true;
    for (uint32_t mask = 1; mask < (1u << n) && monotone; ++mask) {
        if (__builtin_popcount(mask) == n) continue;  // nothing free
        std::vector<int> pinned, free_verts;
        for (int v = 0; v < n; ++v)
            ((mask >> v) & 1 ? pinned : free_verts).push_back(v);
        // consistent pinnings on the pinned set
        std::set<std::vector<int>> taus_set;
        std::vector<int> key(pinned.size());
        for (int i = 0; i < full.size(); ++i) {
            for (size_t j = 0; j < pinned.size(); ++j)
                key[j] = full.space.spin_of(full.states[i], pinned[j]);
            taus_set.insert(key);
        }
        std::vector<std::vector<int>> taus(taus_set.begin(), taus_set.end());
        for (size_t ia = 0; ia < taus.size() && monotone; ++ia) {
            for (size_t ib = 0; ib < taus.size() && monotone; ++ib) {
                if (ia == ib) continue;
                if (compare_partial(pinned, taus[ia], taus[ib], order) != 1) continue;
                // taus[ia] >= taus[ib]: conditional given ia must dominate
                Pinning ta, tb;
                for (size_t j = 0; j < pinned.size(); ++j) {
                    ta.set(pinned[j], taus[ia][j]);
                    tb.set(pinned[j], taus[ib][j]);
                }
                GibbsTable sa = condition_table(full, ta);
                GibbsTable sb = condition_table(full, tb);
                // poset on the union of conditional supports, projected to free vertices
                std::map<std::vector<int>, std::pair<double, double>> atoms;
                std::vector<int> fk(free_verts.size());
                for (int i = 0; i < sa.size(); ++i) {
                    for (size_t j = 0; j < free_verts.size(); ++j)
                        fk[j] = sa.space.spin_of(sa.states[i], free_verts[j]);
                    atoms[fk].first += sa.probs[i];
                }
                for (int i = 0; i < sb.size(); ++i) {
                    for (size_t j = 0; j < free_verts.size(); ++j)
                        fk[j] = sb.space.spin_of(sb.states[i], free_verts[j]);
                    atoms[fk].second += sb.probs[i];
                }
                std::vector<std::vector<int>> elems;
                std::vector<double> pa, pb;
                for (auto& [cfg, pr] : atoms) {
                    elems.push_back(cfg);
                    pa.push_back(pr.first);
                    pb.push_back(pr.second);
                }
                Poset poset = make_poset(static_cast<int>(elems.size()), [&](int x, int y) {
                    return compare_partial(free_verts, elems[x], elems[y], order) == 1 &&
                           elems[x] != elems[y];
                });
                bool ok = true;
                bool complete = enumerate_up_sets(poset, up_set_cap, [&](const std::vector<char>& in) {
                    double ma = 0.0, mb = 0.0;
                    for (size_t e = 0; e < in.size(); ++e)
                        if (in[e]) {
                            ma += pa[e];
                            mb += pb[e];
                        }
                    if (ma < mb - 1e-12) ok = false;
                    return ok;
                });
                if (!ok)
                    monotone = false;  // early abort on a found violation
                else if (!complete)
                    throw std::runtime_error("is_monotone: up-set enumeration cap exceeded");
            }
        }
    }
    return monotone;
}

bool is_heat_bath_monotone(const SpinSystem& sys, const SpinOrder& order) {
    const Graph& g = *sys.graph;
    const int q = sys.q;
    for (int v = 0; v < g.n; ++v) {
        const auto& nbrs = g.adjacency[v];
        const int d = static_cast<int>(nbrs.size());
        uint64_t total = 1;
        for (int i = 0; i < d; ++i) {
            total *= static_cast<uint64_t>(q);
            if (total > (1u << 22))
                throw std::runtime_error("is_heat_bath_monotone: neighborhood too large");
        }
        std::vector<int> eta(d, 0);
        std::vector<double> w1(q), w2(q);
        for (uint64_t code = 0; code < total; ++code) {
            uint64_t rem = code;
            for (int i = 0; i < d; ++i) {
                eta[i] = static_cast<int>(rem % q);
                rem /= q;
            }
            // raise one neighbor by one rank and require dominance
            for (int i = 0; i < d; ++i) {
                int u = nbrs[i];
                int r = order.rank(u, eta[i]);
                if (r + 1 >= q) continue;
                int raised = order.order[u][r + 1];
                auto weights = [&](int replaced, std::vector<double>& w) {
                    for (int s = 0; s < q; ++s) {
                        double acc = sys.U[v][s];
                        for (int j = 0; j < d; ++j) {
                            int spin_u = (j == i) ? replaced : eta[j];
                            double t = sys.k_entry(s, spin_u);
                            acc = (is_hard(acc) || is_hard(t)) ? kHardConstraint : acc + t;
                        }
                        w[s] = is_hard(acc) ? 0.0 : std::exp(acc);
                    }
                };
                weights(raised, w1);   // higher neighborhood
                weights(eta[i], w2);   // lower neighborhood
                double z1 = 0.0, z2 = 0.0;
                for (int s = 0; s < q; ++s) {
                    z1 += w1[s];
                    z2 += w2[s];
                }
                if (z1 == 0.0 || z2 == 0.0) continue;  // inconsistent neighborhood
                double cdf1 = 0.0, cdf2 = 0.0;
                for (int r2 = 0; r2 < q - 1; ++r2) {
                    int s = order.order[v][r2];
                    cdf1 += w1[s] / z1;
                    cdf2 += w2[s] / z2;
                    if (cdf1 > cdf2 + 1e-12) return false;
                }
            }
        }
    }
    return true;
}

}  // namespace spinsi
