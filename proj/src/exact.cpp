#include "spinsi/exact.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace spinsi {

Eigen::VectorXd TransitionMatrix::stationary() const {
    Eigen::VectorXd mu(table.size());
    for (int i = 0; i < table.size(); ++i) mu(i) = table.probs[i];
    return mu;
}

TransitionMatrix site_kernel(const GibbsTable& tbl, int v) {
    const int m = tbl.size();
    TransitionMatrix tm;
    tm.table = tbl;
    tm.kernel_name = "site(" + std::to_string(v) + ")";
    tm.P = Eigen::MatrixXd::Zero(m, m);
    const int q = tbl.space.q;
    for (int i = 0; i < m; ++i) {
        uint32_t code = tbl.states[i];
        double z = 0.0;
        std::vector<std::pair<int, double>> entries;
        for (int s = 0; s < q; ++s) {
            int j = tbl.row_of(tbl.space.with_spin(code, v, s));
            if (j >= 0) {
                entries.emplace_back(j, tbl.probs[j]);
                z += tbl.probs[j];
            }
        }
        for (auto [j, w] : entries) tm.P(i, j) = w / z;
    }
    return tm;
}

TransitionMatrix block_kernel(const GibbsTable& tbl, const std::vector<int>& block) {
    const int m = tbl.size();
    TransitionMatrix tm;
    tm.table = tbl;
    tm.kernel_name = "block";
    tm.P = Eigen::MatrixXd::Zero(m, m);
    std::vector<char> in_block(tbl.space.n, 0);
    for (int v : block) in_block[v] = 1;
    // group states by their configuration outside the block
    std::unordered_map<uint64_t, std::vector<int>> groups;
    for (int i = 0; i < m; ++i) {
        uint64_t key = 0;
        for (int v = 0; v < tbl.space.n; ++v)
            if (!in_block[v]) key = key * tbl.space.q + tbl.space.spin_of(tbl.states[i], v);
        groups[key].push_back(i);
    }
    for (auto& [key, rows] : groups) {
        double z = 0.0;
        for (int j : rows) z += tbl.probs[j];
        for (int i : rows)
            for (int j : rows) tm.P(i, j) = tbl.probs[j] / z;
    }
    return tm;
}

TransitionMatrix induced_glauber(const GibbsTable& tbl) {
    const int n = tbl.space.n;
    TransitionMatrix tm;
    tm.table = tbl;
    tm.kernel_name = "glauber";
    tm.P = Eigen::MatrixXd::Zero(tbl.size(), tbl.size());
    for (int v = 0; v < n; ++v) tm.P += site_kernel(tbl, v).P;
    tm.P /= static_cast<double>(n);
    return tm;
}

TransitionMatrix induced_scan(const GibbsTable& tbl, const ScanOrder& phi) {
    if (!phi.valid(tbl.space.n)) throw std::invalid_argument("induced_scan: invalid order");
    TransitionMatrix tm;
    tm.table = tbl;
    tm.kernel_name = "scan";
    Eigen::MatrixXd M = Eigen::MatrixXd::Identity(tbl.size(), tbl.size());
    for (int i = 0; i < tbl.space.n; ++i) M = M * site_kernel(tbl, phi.order[i]).P;
    for (int i = tbl.space.n - 1; i >= 0; --i) M = M * site_kernel(tbl, phi.order[i]).P;
    tm.P = M;
    return tm;
}

TransitionMatrix induced_scan_oneway(const GibbsTable& tbl, const ScanOrder& phi) {
    if (!phi.valid(tbl.space.n)) throw std::invalid_argument("induced_scan_oneway: invalid order");
    TransitionMatrix tm;
    tm.table = tbl;
    tm.kernel_name = "scan_oneway";
    Eigen::MatrixXd M = Eigen::MatrixXd::Identity(tbl.size(), tbl.size());
    for (int i = 0; i < tbl.space.n; ++i) M = M * site_kernel(tbl, phi.order[i]).P;
    tm.P = M;
    return tm;
}

TransitionMatrix induced_even_odd(const GibbsTable& tbl, const Graph& g,
                                  const std::vector<int>& evens, const std::vector<int>& odds,
                                  bool literal_four_sweeps) {
    std::vector<char> side(g.n, -1);
    for (int v : evens) side[v] = 0;
    for (int v : odds) side[v] = 1;
    for (int v = 0; v < g.n; ++v)
        if (side[v] < 0) throw std::invalid_argument("induced_even_odd: classes do not cover V");
    for (auto [u, v] : g.edges)
        if (side[u] == side[v])
            throw std::invalid_argument("induced_even_odd: classes are not a bipartition");
    auto sweep = [&](const std::vector<int>& cls) {
        Eigen::MatrixXd M = Eigen::MatrixXd::Identity(tbl.size(), tbl.size());
        for (int v : cls) M = M * site_kernel(tbl, v).P;
        return M;
    };
    Eigen::MatrixXd E = sweep(evens), O = sweep(odds);
    TransitionMatrix tm;
    tm.table = tbl;
    tm.kernel_name = "evenodd";
    tm.P = literal_four_sweeps ? Eigen::MatrixXd(E * O * O * E) : Eigen::MatrixXd(E * O * E);
    return tm;
}

TransitionMatrix induced_block(const GibbsTable& tbl, const BlockSpec& spec) {
    spec.validate(tbl.space.n);
    TransitionMatrix tm;
    tm.table = tbl;
    tm.kernel_name = "block";
    tm.P = Eigen::MatrixXd::Zero(tbl.size(), tbl.size());
    for (size_t i = 0; i < spec.blocks.size(); ++i)
        tm.P += spec.weights[i] * block_kernel(tbl, spec.blocks[i]).P;
    return tm;
}

TransitionMatrix induced_sw(const GibbsTable& tbl, const SpinSystem& sys) {
    require_sw_applicable(sys);
    const auto& edges = sys.graph->edges;
    if (edges.size() > 20) throw std::runtime_error("induced_sw: |E| > 20 exceeds cap");
    const double p = sw_percolation_probability(sys);
    const int m = tbl.size();
    TransitionMatrix tm;
    tm.table = tbl;
    tm.kernel_name = "sw";
    tm.P = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
        uint32_t code = tbl.states[i];
        auto sigma = tbl.space.decode(code);
        std::vector<int> mono;
        for (size_t e = 0; e < edges.size(); ++e)
            if (sigma[edges[e].first] == sigma[edges[e].second]) mono.push_back(static_cast<int>(e));
        const int me = static_cast<int>(mono.size());
        for (uint32_t sub = 0; sub < (1u << me); ++sub) {
            std::vector<int> subset;
            for (int b = 0; b < me; ++b)
                if (sub & (1u << b)) subset.push_back(mono[b]);
            double pa = std::pow(p, subset.size()) * std::pow(1.0 - p, me - subset.size());
            if (pa == 0.0) continue;
            auto comps = connected_components_edges(*sys.graph, subset);
            double per_target = pa * std::pow(1.0 / sys.q, comps.size());
            for (int j = 0; j < m; ++j) {
                uint32_t target = tbl.states[j];
                bool consistent = true;
                for (const auto& comp : comps) {
                    int s0 = tbl.space.spin_of(target, comp[0]);
                    for (size_t t = 1; t < comp.size() && consistent; ++t)
                        if (tbl.space.spin_of(target, comp[t]) != s0) consistent = false;
                    if (!consistent) break;
                }
                if (consistent) tm.P(i, j) += per_target;
            }
        }
    }
    return tm;
}

double stationarity_residual(const TransitionMatrix& tm) {
    Eigen::VectorXd mu = tm.stationary();
    Eigen::VectorXd diff = tm.P.transpose() * mu - mu;
    return diff.cwiseAbs().maxCoeff();
}

double reversibility_residual(const TransitionMatrix& tm) {
    Eigen::VectorXd mu = tm.stationary();
    double worst = 0.0;
    for (int i = 0; i < tm.size(); ++i)
        for (int j = i + 1; j < tm.size(); ++j)
            worst = std::max(worst, std::abs(mu(i) * tm.P(i, j) - mu(j) * tm.P(j, i)));
    return worst;
}

Eigen::VectorXd reversible_spectrum(const TransitionMatrix& tm, double reversibility_tol) {
    if (reversibility_residual(tm) > reversibility_tol)
        throw std::runtime_error("reversible_spectrum: kernel is not reversible");
    Eigen::VectorXd mu = tm.stationary();
    Eigen::VectorXd sq = mu.cwiseSqrt();
    Eigen::MatrixXd S = sq.asDiagonal() * tm.P * sq.cwiseInverse().asDiagonal();
    S = 0.5 * (S + S.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(S);
    return solver.eigenvalues();
}

double spectral_gap(const TransitionMatrix& tm, double reversibility_tol) {
    Eigen::VectorXd ev = reversible_spectrum(tm, reversibility_tol);
    const int m = static_cast<int>(ev.size());
    if (m <= 1) return 1.0;
    double lambda2 = ev(m - 2);
    double lambda_min = ev(0);
    return 1.0 - std::max(std::abs(lambda2), std::abs(lambda_min));
}

double tv_distance_at(const TransitionMatrix& tm, long t) {
    Eigen::MatrixXd M = Eigen::MatrixXd::Identity(tm.size(), tm.size());
    for (long s = 0; s < t; ++s) M = M * tm.P;
    Eigen::VectorXd mu = tm.stationary();
    double worst = 0.0;
    for (int i = 0; i < tm.size(); ++i) {
        double tv = 0.0;
        for (int j = 0; j < tm.size(); ++j) tv += std::abs(M(i, j) - mu(j));
        worst = std::max(worst, 0.5 * tv);
    }
    return worst;
}

long tv_mixing_time(const TransitionMatrix& tm, double eps, long max_steps) {
    Eigen::MatrixXd M = tm.P;
    Eigen::VectorXd mu = tm.stationary();
    for (long t = 1; t <= max_steps; ++t) {
        double worst = 0.0;
        for (int i = 0; i < tm.size(); ++i) {
            double tv = 0.0;
            for (int j = 0; j < tm.size(); ++j) tv += std::abs(M(i, j) - mu(j));
            worst = std::max(worst, 0.5 * tv);
        }
        if (worst <= eps) return t;
        M = M * tm.P;
    }
    throw std::runtime_error("tv_mixing_time: did not mix within max_steps");
}

double entropy(const std::vector<double>& f, const std::vector<double>& mu) {
    double ef = 0.0, eflogf = 0.0;
    for (size_t i = 0; i < f.size(); ++i) {
        if (f[i] < 0.0) throw std::invalid_argument("entropy: negative f");
        ef += mu[i] * f[i];
        if (f[i] > 0.0) eflogf += mu[i] * f[i] * std::log(f[i]);
    }
    if (ef <= 0.0) return 0.0;
    return eflogf - ef * std::log(ef);
}

double relative_entropy(const std::vector<double>& nu, const std::vector<double>& mu) {
    double h = 0.0;
    for (size_t i = 0; i < nu.size(); ++i) {
        if (nu[i] < -1e-15) throw std::invalid_argument("relative_entropy: negative mass");
        if (nu[i] > 0.0) {
            if (mu[i] <= 0.0)
                throw std::invalid_argument("relative_entropy: nu not absolutely continuous");
            h += nu[i] * std::log(nu[i] / mu[i]);
        }
    }
    return h;
}

double dirichlet_form(const TransitionMatrix& tm, const std::vector<double>& f,
                      const std::vector<double>& g) {
    double acc = 0.0;
    for (int i = 0; i < tm.size(); ++i)
        for (int j = 0; j < tm.size(); ++j) {
            double w = tm.table.probs[i] * tm.P(i, j);
            if (w > 0.0 && i != j) acc += w * (f[i] - f[j]) * (g[i] - g[j]);
        }
    return 0.5 * acc;
}

double dirichlet_inner(const TransitionMatrix& tm, const std::vector<double>& f,
                       const std::vector<double>& g) {
    const int m = tm.size();
    Eigen::VectorXd fv(m), gv(m);
    for (int i = 0; i < m; ++i) {
        fv(i) = f[i];
        gv(i) = g[i];
    }
    Eigen::VectorXd h = gv - tm.P * gv;
    double acc = 0.0;
    for (int i = 0; i < m; ++i) acc += tm.table.probs[i] * fv(i) * h(i);
    return acc;
}

namespace {

struct SparsePairs {
    // unordered support pairs (i < j) with weight mu(i) P(i, j)
    std::vector<std::tuple<int, int, double>> pairs;
};

SparsePairs dirichlet_pairs(const TransitionMatrix& tm) {
    SparsePairs sp;
    for (int i = 0; i < tm.size(); ++i)
        for (int j = i + 1; j < tm.size(); ++j) {
            double w = tm.table.probs[i] * tm.P(i, j);
            if (w > 0.0) sp.pairs.emplace_back(i, j, w);
        }
    return sp;
}

double mlsi_ratio(const SparsePairs& sp, const std::vector<double>& mu,
                  const std::vector<double>& f) {
    double ent = entropy(f, mu);
    if (ent <= 1e-300) return std::numeric_limits<double>::infinity();
    double dir = 0.0;
    for (auto [i, j, w] : sp.pairs)
        dir += w * (f[i] - f[j]) * (std::log(f[i]) - std::log(f[j]));
    return dir / ent;
}

}  // namespace

MlsiEstimate mlsi_estimate(const TransitionMatrix& tm, int trials, Rng& rng) {
    MlsiEstimate est;
    const int m = tm.size();
    std::vector<double> mu = tm.table.probs;
    est.mu_min = *std::min_element(mu.begin(), mu.end());
    est.gap = spectral_gap(tm);
    est.bracket_hi = 2.0 * est.gap;
    if (est.mu_min >= 0.5 - 1e-15) {
        // two-point uniform chain: the prefactor tends to 1/2
        est.bracket_lo = 0.5 * est.gap;
        est.degenerate = m <= 2;
    } else {
        est.bracket_lo =
            (1.0 - 2.0 * est.mu_min) / std::log(1.0 / est.mu_min - 1.0) * est.gap;
    }
    if (m <= 1) {
        est.witness = est.bracket_hi;
        est.degenerate = true;
        return est;
    }

    SparsePairs sp = dirichlet_pairs(tm);
    double best = std::numeric_limits<double>::infinity();
    std::vector<double> f(m);

    // random nonnegative functions plus a short local minimization
    for (int t = 0; t < trials; ++t) {
        for (int i = 0; i < m; ++i) f[i] = std::max(rng.exponential(), 1e-9);
        double cur = mlsi_ratio(sp, mu, f);
        for (int it = 0; it < 40; ++it) {
            int idx = rng.uniform_int(m);
            double old = f[idx];
            f[idx] = std::max(old * std::exp(0.25 * rng.normal()), 1e-9);
            double cand = mlsi_ratio(sp, mu, f);
            if (cand < cur) {
                cur = cand;
            } else {
                f[idx] = old;
            }
        }
        best = std::min(best, cur);
    }

    // perturbations f = 1 + eps g around the second eigenfunction, evaluated
    // through log1p so the O(eps^2) entropy survives in floating point
    Eigen::VectorXd musqrt(m);
    for (int i = 0; i < m; ++i) musqrt(i) = std::sqrt(mu[i]);
    Eigen::MatrixXd S = musqrt.asDiagonal() * tm.P * musqrt.cwiseInverse().asDiagonal();
    S = 0.5 * (S + S.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(S);
    if (m >= 2) {
        Eigen::VectorXd phi2 = solver.eigenvectors().col(m - 2);
        Eigen::VectorXd g = phi2.cwiseQuotient(musqrt);
        double scale = g.cwiseAbs().maxCoeff();
        if (scale > 0.0) {
            g /= scale;
            auto perturbed_ratio = [&](double eps) {
                double dir = 0.0;
                for (auto [i, j, w] : sp.pairs)
                    dir += w * eps * (g(i) - g(j)) * (std::log1p(eps * g(i)) - std::log1p(eps * g(j)));
                double ghat = 0.0;
                for (int i = 0; i < m; ++i) ghat += mu[i] * g(i);
                double eflogf = 0.0;
                for (int i = 0; i < m; ++i)
                    eflogf += mu[i] * (1.0 + eps * g(i)) * std::log1p(eps * g(i));
                double ent = eflogf - (1.0 + eps * ghat) * std::log1p(eps * ghat);
                if (ent <= 0.0) return std::numeric_limits<double>::infinity();
                return dir / ent;
            };
            for (double eps : {1e-3, 1e-4, 1e-5, 1e-6, 1e-7}) {
                best = std::min(best, perturbed_ratio(eps));
                best = std::min(best, perturbed_ratio(-eps));
            }
        }
    }
    est.witness = best;
    return est;
}

bool entropy_decay_check(const TransitionMatrix& tm, const std::vector<double>& nu, double r) {
    const int m = tm.size();
    Eigen::VectorXd nuv(m);
    for (int i = 0; i < m; ++i) nuv(i) = nu[i];
    Eigen::VectorXd next = tm.P.transpose() * nuv;
    std::vector<double> nu_next(m);
    for (int i = 0; i < m; ++i) nu_next[i] = std::max(next(i), 0.0);
    double before = relative_entropy(nu, tm.table.probs);
    double after = relative_entropy(nu_next, tm.table.probs);
    return after <= (1.0 - r) * before + 1e-12;
}

double expected_conditional_entropy(const GibbsTable& tbl, const std::vector<double>& f,
                                    const std::vector<int>& block) {
    std::vector<char> in_block(tbl.space.n, 0);
    for (int v : block) in_block[v] = 1;
    struct Acc {
        double w = 0.0;
        double wf = 0.0;
        double wflogf = 0.0;
    };
    std::unordered_map<uint64_t, Acc> groups;
    for (int i = 0; i < tbl.size(); ++i) {
        uint64_t key = 0;
        for (int v = 0; v < tbl.space.n; ++v)
            if (!in_block[v]) key = key * tbl.space.q + tbl.space.spin_of(tbl.states[i], v);
        Acc& a = groups[key];
        double p = tbl.probs[i];
        a.w += p;
        a.wf += p * f[i];
        if (f[i] > 0.0) a.wflogf += p * f[i] * std::log(f[i]);
    }
    double total = 0.0;
    for (auto& [key, a] : groups) {
        if (a.wf <= 0.0 || a.w <= 0.0) continue;
        total += a.wflogf - a.wf * std::log(a.wf / a.w);
    }
    return total;
}

namespace {

FactorizationReport make_report(const std::string& scheme, double lhs, double rhs,
                                double reference, bool flagged) {
    FactorizationReport rep;
    rep.scheme = scheme;
    rep.lhs = lhs;
    rep.rhs = rhs;
    rep.reference_constant = reference;
    rep.reference_flagged = flagged;
    rep.ratio_defined = rhs > 1e-14;
    rep.ratio = rep.ratio_defined ? lhs / rhs : 0.0;
    rep.holds = lhs <= reference * rhs + 1e-10;
    return rep;
}

}  // namespace

FactorizationReport factorization_at(const GibbsTable& tbl, const std::vector<double>& f,
                                     double reference_constant) {
    double lhs = entropy(f, tbl.probs);
    double rhs = 0.0;
    for (int v = 0; v < tbl.space.n; ++v) rhs += expected_conditional_entropy(tbl, f, {v});
    return make_report("AT", lhs, rhs, reference_constant, false);
}

FactorizationReport factorization_ubf(const GibbsTable& tbl, const std::vector<double>& f, int ell,
                                      double reference_constant) {
    const int n = tbl.space.n;
    if (ell < 1 || ell > n) throw std::invalid_argument("factorization_ubf: bad ell");
    double lhs = (static_cast<double>(ell) / n) * entropy(f, tbl.probs);
    double rhs = 0.0;
    long count = 0;
    std::vector<int> subset;
    // iterate all size-ell subsets
    std::vector<int> idx(ell);
    for (int i = 0; i < ell; ++i) idx[i] = i;
    while (true) {
        rhs += expected_conditional_entropy(tbl, f, idx);
        ++count;
        int pos = ell - 1;
        while (pos >= 0 && idx[pos] == n - ell + pos) --pos;
        if (pos < 0) break;
        ++idx[pos];
        for (int i = pos + 1; i < ell; ++i) idx[i] = idx[i - 1] + 1;
    }
    rhs /= static_cast<double>(count);
    return make_report("UBF(" + std::to_string(ell) + ")", lhs, rhs, reference_constant, false);
}

FactorizationReport factorization_kpf(const GibbsTable& tbl, const std::vector<double>& f,
                                      const std::vector<std::vector<int>>& classes,
                                      double reference_constant) {
    double lhs = entropy(f, tbl.probs);
    double rhs = 0.0;
    for (const auto& cls : classes)
        if (!cls.empty()) rhs += expected_conditional_entropy(tbl, f, cls);
    return make_report("KPF", lhs, rhs, reference_constant, true);
}

FactorizationReport factorization_gbf(const GibbsTable& tbl, const std::vector<double>& f,
                                      const BlockSpec& spec, double reference_constant) {
    spec.validate(tbl.space.n);
    double lhs = spec.alpha_min(tbl.space.n) * entropy(f, tbl.probs);
    double rhs = 0.0;
    for (size_t i = 0; i < spec.blocks.size(); ++i)
        rhs += spec.weights[i] * expected_conditional_entropy(tbl, f, spec.blocks[i]);
    return make_report("GBF", lhs, rhs, reference_constant, true);
}

JointTable exact_edwards_sokal(const SpinSystem& sys, uint64_t cap) {
    require_sw_applicable(sys);
    const double p = sw_percolation_probability(sys);
    const auto& edges = sys.graph->edges;
    if (edges.size() > 20) throw std::runtime_error("exact_edwards_sokal: |E| > 20");
    StateSpace space(sys.n(), sys.q);
    if (space.size() * (1ull << edges.size()) > cap * 16)
        throw std::runtime_error("exact_edwards_sokal: joint space exceeds cap");
    JointTable joint;
    joint.spin_space = space;
    double total = 0.0;
    for (uint64_t code = 0; code < space.size(); ++code) {
        auto sigma = space.decode(static_cast<uint32_t>(code));
        std::vector<int> mono;
        for (size_t e = 0; e < edges.size(); ++e)
            if (sigma[edges[e].first] == sigma[edges[e].second]) mono.push_back(static_cast<int>(e));
        const int me = static_cast<int>(mono.size());
        for (uint32_t sub = 0; sub < (1u << me); ++sub) {
            uint32_t mask = 0;
            int bits = __builtin_popcount(sub);
            for (int b = 0; b < me; ++b)
                if (sub & (1u << b)) mask |= (1u << mono[b]);
            double w = std::pow(p, bits) * std::pow(1.0 - p, edges.size() - bits);
            if (w <= 0.0) continue;
            joint.spin_codes.push_back(static_cast<uint32_t>(code));
            joint.edge_masks.push_back(mask);
            joint.probs.push_back(w);
            total += w;
        }
    }
    for (double& w : joint.probs) w /= total;
    return joint;
}

FactorizationReport factorization_edge_spin(const JointTable& joint, const std::vector<double>& f,
                                            double reference_constant) {
    double lhs = entropy(f, joint.probs);
    struct Acc {
        double w = 0.0, wf = 0.0, wflogf = 0.0;
    };
    auto accumulate = [&](const std::vector<uint64_t>& keys) {
        std::unordered_map<uint64_t, Acc> groups;
        for (int i = 0; i < joint.size(); ++i) {
            Acc& a = groups[keys[i]];
            double p = joint.probs[i];
            a.w += p;
            a.wf += p * f[i];
            if (f[i] > 0.0) a.wflogf += p * f[i] * std::log(f[i]);
        }
        double total = 0.0;
        for (auto& [k, a] : groups) {
            if (a.wf <= 0.0 || a.w <= 0.0) continue;
            total += a.wflogf - a.wf * std::log(a.wf / a.w);
        }
        return total;
    };
    std::vector<uint64_t> by_spin(joint.size()), by_edge(joint.size());
    for (int i = 0; i < joint.size(); ++i) {
        by_spin[i] = joint.spin_codes[i];
        by_edge[i] = joint.edge_masks[i];
    }
    // conditioning on sigma leaves the edge half free, and vice versa
    double rhs = accumulate(by_spin) + accumulate(by_edge);
    return make_report("edge-spin", lhs, rhs, reference_constant, true);
}

namespace {

// marginal distribution over the configurations of `verts` in a table slice
std::unordered_map<uint64_t, double> slice_marginal(const GibbsTable& tbl,
                                                    const std::vector<int>& verts) {
    std::unordered_map<uint64_t, double> out;
    for (int i = 0; i < tbl.size(); ++i) {
        uint64_t key = 0;
        for (int v : verts) key = key * tbl.space.q + tbl.space.spin_of(tbl.states[i], v);
        out[key] += tbl.probs[i];
    }
    return out;
}

}  // namespace

double chain_rule_residual(const GibbsTable& tbl, const std::vector<double>& f_cube,
                           const std::vector<std::vector<int>>& nested, const Pinning& tau) {
    // free set Lambda = complement of tau's domain; nested[0] subset ... subset nested[m-1]
    const int n = tbl.space.n;
    const int q = tbl.space.q;
    std::vector<int> lambda;
    for (int v = 0; v < n; ++v)
        if (!tau.pins(v)) lambda.push_back(v);
    GibbsTable slice = tau.empty() ? tbl : condition_table(tbl, tau);

    auto ent_term = [&](const std::vector<int>& outer_pin_verts, const std::vector<int>& b_verts) {
        // E_{gamma ~ marginal on outer} [ Ent over B of E[f | gamma, sigma_B] ]
        double total = 0.0;
        auto gammas = slice_marginal(slice, outer_pin_verts);
        for (auto& [gkey, gw] : gammas) {
            Pinning pin = tau;
            {
                uint64_t k = gkey;
                for (int j = static_cast<int>(outer_pin_verts.size()) - 1; j >= 0; --j) {
                    pin.set(outer_pin_verts[j], static_cast<int>(k % q));
                    k /= q;
                }
            }
            GibbsTable sub = pin.empty() ? tbl : condition_table(tbl, pin);
            // group the conditional support by the configuration on B; the
            // projected function is the conditional expectation of f given
            // the pinning and sigma_B
            struct Acc {
                double w = 0.0, wf = 0.0;
            };
            std::unordered_map<uint64_t, Acc> groups;
            for (int i = 0; i < sub.size(); ++i) {
                uint64_t key = 0;
                for (int v : b_verts) key = key * q + sub.space.spin_of(sub.states[i], v);
                Acc& a = groups[key];
                a.w += sub.probs[i];
                a.wf += sub.probs[i] * f_cube[sub.states[i]];
            }
            double ent = 0.0, mean = 0.0;
            for (auto& [key, a] : groups) {
                if (a.w <= 0.0) continue;
                double g = a.wf / a.w;
                mean += a.w * g;
                if (g > 0.0) ent += a.w * g * std::log(g);
            }
            if (mean > 0.0) ent -= mean * std::log(mean);
            total += gw * ent;
        }
        return total;
    };

    const int m = static_cast<int>(nested.size());
    double lhs = 0.0;
    for (int i = 0; i < m; ++i) {
        const auto& cur = nested[i];
        std::vector<char> in_cur(n, 0);
        for (int v : cur) in_cur[v] = 1;
        std::vector<int> outer;  // Lambda \ Lambda_i
        for (int v : lambda)
            if (!in_cur[v]) outer.push_back(v);
        std::vector<int> b_verts;  // Lambda_i \ Lambda_{i-1}
        std::vector<char> in_prev(n, 0);
        if (i > 0)
            for (int v : nested[i - 1]) in_prev[v] = 1;
        for (int v : cur)
            if (!in_prev[v]) b_verts.push_back(v);
        lhs += ent_term(outer, b_verts);
    }
    // rhs: pin Lambda \ Lambda_m, entropy over Lambda_m of f itself
    std::vector<char> in_last(n, 0);
    for (int v : nested[m - 1]) in_last[v] = 1;
    std::vector<int> outer_last;
    for (int v : lambda)
        if (!in_last[v]) outer_last.push_back(v);
    double rhs = ent_term(outer_last, nested[m - 1]);
    return std::abs(lhs - rhs);
}

bool censoring_order_check(const TransitionMatrix& K, const TransitionMatrix& L,
                           const SpinOrder& order, size_t up_set_cap, int state_cap) {
    if (K.table.states != L.table.states)
        throw std::invalid_argument("censoring_order_check: state spaces differ");
    const int m = K.size();
    if (m > state_cap) throw std::runtime_error("censoring_order_check: state space too large");
    for (int i = 0; i < m; ++i)
        if (std::abs(K.table.probs[i] - L.table.probs[i]) > 1e-12)
            throw std::invalid_argument("censoring_order_check: stationary distributions differ");
    const auto& space = K.table.space;
    auto dominates = [&](int a, int b) {
        bool ge = false;
        for (int v = 0; v < space.n; ++v) {
            int ra = order.rank(v, space.spin_of(K.table.states[a], v));
            int rb = order.rank(v, space.spin_of(K.table.states[b], v));
            if (ra < rb) return false;
            if (ra > rb) ge = true;
        }
        return ge;
    };
    Poset poset = make_poset(m, dominates);
    auto up_sets = all_up_sets(poset, up_set_cap);
    // precompute K 1_U and L 1_U for every up-set
    const size_t nu = up_sets.size();
    std::vector<Eigen::VectorXd> ku(nu), lu(nu);
    Eigen::VectorXd ind(m);
    for (size_t a = 0; a < nu; ++a) {
        for (int i = 0; i < m; ++i) ind(i) = up_sets[a][i] ? 1.0 : 0.0;
        ku[a] = K.P * ind;
        lu[a] = L.P * ind;
    }
    Eigen::VectorXd mu = K.stationary();
    for (size_t a = 0; a < nu; ++a) {
        for (size_t b = 0; b < nu; ++b) {
            double lhs = 0.0, rhs = 0.0;
            for (int i = 0; i < m; ++i) {
                if (!up_sets[b][i]) continue;
                lhs += mu(i) * ku[a](i);
                rhs += mu(i) * lu[a](i);
            }
            if (lhs > rhs + 1e-10) return false;
        }
    }
    return true;
}

}  // namespace spinsi
