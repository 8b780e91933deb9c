#include "spinsi/spectral.hpp"

#include <cmath>
#include <stdexcept>

namespace spinsi {

namespace {

// single and pair marginals of a conditional slice, restricted to unpinned vertices
struct SliceMarginals {
    std::vector<std::vector<double>> single;                // [v][s]
    std::vector<std::vector<std::vector<std::vector<double>>>> pair;  // [u][a][v][b]
};

SliceMarginals slice_marginals(const GibbsTable& slice) {
    const int n = slice.space.n;
    const int q = slice.space.q;
    SliceMarginals m;
    m.single.assign(n, std::vector<double>(q, 0.0));
    m.pair.assign(n, std::vector<std::vector<std::vector<double>>>(
                         q, std::vector<std::vector<double>>(n, std::vector<double>(q, 0.0))));
    for (int i = 0; i < slice.size(); ++i) {
        uint32_t code = slice.states[i];
        double p = slice.probs[i];
        for (int v = 0; v < n; ++v) {
            int sv = slice.space.spin_of(code, v);
            m.single[v][sv] += p;
            for (int u = v + 1; u < n; ++u) {
                int su = slice.space.spin_of(code, u);
                m.pair[v][sv][u][su] += p;
                m.pair[u][su][v][sv] += p;
            }
        }
    }
    return m;
}

}  // namespace

InfluenceMatrix influence_matrix(const GibbsTable& full, const Pinning& tau) {
    GibbsTable slice = tau.empty() ? full : condition_table(full, tau);
    auto pairs = consistent_pairs(slice, tau);
    auto marg = slice_marginals(slice);
    InfluenceMatrix infl;
    infl.index = pairs;
    infl.pinning = tau;
    const int m = static_cast<int>(pairs.size());
    infl.psi = Eigen::MatrixXd::Zero(m, m);
    for (int a = 0; a < m; ++a) {
        auto [u, su] = pairs[a];
        double pu = marg.single[u][su];
        for (int b = 0; b < m; ++b) {
            auto [v, sv] = pairs[b];
            if (u == v) continue;  // same-vertex block is exactly zero
            infl.psi(a, b) = marg.pair[u][su][v][sv] / pu - marg.single[v][sv];
        }
    }
    return infl;
}

double top_eigenvalue(const Eigen::MatrixXd& m) {
    if (m.rows() == 0) return 0.0;
    Eigen::EigenSolver<Eigen::MatrixXd> solver(m);
    double best = -std::numeric_limits<double>::infinity();
    double best_imag = 0.0;
    for (int i = 0; i < m.rows(); ++i) {
        double re = solver.eigenvalues()(i).real();
        if (re > best) {
            best = re;
            best_imag = solver.eigenvalues()(i).imag();
        }
    }
    if (std::abs(best_imag) > 1e-8)
        throw std::runtime_error("top_eigenvalue: top eigenvalue is not numerically real");
    return best;
}

EtaResult eta(const SpinSystem& sys, int max_pinned, uint64_t cap_states) {
    GibbsTable full = exact_gibbs(sys, cap_states);
    const int n = sys.n();
    if (max_pinned < 0) max_pinned = n;
    // TODO: build all slices of one pinned-set mask in a single support sweep
    // instead of re-filtering the full table per pinning; ~20x at the
    // n=10, q=3 envelope edge.
    EtaResult result;
    result.eta = 0.0;
    for_each_pinning(full, max_pinned, 2, [&](const Pinning& tau) {
        InfluenceMatrix infl = influence_matrix(full, tau);
        double lambda = top_eigenvalue(infl.psi);
        ++result.pinnings_checked;
        if (lambda > result.eta) {
            result.eta = lambda;
            result.witness = tau;
        }
    });
    return result;
}

DobrushinMatrix dobrushin_matrix(const SpinSystem& sys, uint64_t cap_states) {
    GibbsTable full = exact_gibbs(sys, cap_states);
    const int n = sys.n();
    const int q = sys.q;
    DobrushinMatrix dob;
    dob.entries = Eigen::MatrixXd::Zero(n, n);
    // enumerate full pinnings of V \ {v} from the support projections
    for (int v = 0; v < n; ++v) {
        std::vector<int> others;
        for (int u = 0; u < n; ++u)
            if (u != v) others.push_back(u);
        // conditional distribution at v per boundary configuration
        std::unordered_map<uint64_t, std::vector<double>> cond;
        for (int i = 0; i < full.size(); ++i) {
            uint64_t key = 0;
            for (int u : others) key = key * q + full.space.spin_of(full.states[i], u);
            auto& dist = cond[key];
            if (dist.empty()) dist.assign(q, 0.0);
            dist[full.space.spin_of(full.states[i], v)] += full.probs[i];
        }
        for (auto& [key, dist] : cond) {
            double z = 0.0;
            for (double w : dist) z += w;
            for (double& w : dist) w /= z;
        }
        // pairs disagreeing exactly at u
        for (size_t ui = 0; ui < others.size(); ++ui) {
            int u = others[ui];
            double worst = 0.0;
            for (auto& [key, dist] : cond) {
                // vary the spin at u while keeping the rest of the key
                uint64_t radix = 1;
                for (size_t j = ui + 1; j < others.size(); ++j) radix *= q;
                int su = static_cast<int>((key / radix) % q);
                for (int s2 = su + 1; s2 < q; ++s2) {
                    uint64_t key2 = key + static_cast<uint64_t>(s2 - su) * radix;
                    auto it = cond.find(key2);
                    if (it == cond.end()) continue;
                    double tv = 0.0;
                    for (int s = 0; s < q; ++s) tv += std::abs(dist[s] - it->second[s]);
                    worst = std::max(worst, 0.5 * tv);
                }
            }
            dob.entries(u, v) = std::max(dob.entries(u, v), worst);
        }
    }
    return dob;
}

double spectral_norm(const Eigen::MatrixXd& m) {
    if (m.rows() == 0) return 0.0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    return svd.singularValues()(0);
}

double max_row_sum(const Eigen::MatrixXd& m) {
    double worst = 0.0;
    for (int i = 0; i < m.rows(); ++i) worst = std::max(worst, m.row(i).cwiseAbs().sum());
    return worst;
}

LocalWalk local_random_walk(const GibbsTable& full, const Pinning& tau) {
    GibbsTable slice = tau.empty() ? full : condition_table(full, tau);
    const int n = full.space.n;
    const int k = static_cast<int>(tau.size());
    const int free_count = n - k;
    if (free_count < 2)
        throw std::invalid_argument("local_random_walk: need at least 2 unpinned vertices");
    auto pairs = consistent_pairs(slice, tau);
    auto marg = slice_marginals(slice);
    LocalWalk walk;
    walk.index = pairs;
    walk.free_count = free_count;
    const int m = static_cast<int>(pairs.size());
    walk.P = Eigen::MatrixXd::Zero(m, m);
    walk.pi = Eigen::VectorXd::Zero(m);
    for (int a = 0; a < m; ++a) {
        auto [u, su] = pairs[a];
        walk.pi(a) = marg.single[u][su] / free_count;
        double pu = marg.single[u][su];
        for (int b = 0; b < m; ++b) {
            auto [v, sv] = pairs[b];
            if (u == v) continue;
            walk.P(a, b) = marg.pair[u][su][v][sv] / pu / (free_count - 1);
        }
    }
    return walk;
}

double walk_reversibility_residual(const LocalWalk& walk) {
    double worst = 0.0;
    const int m = static_cast<int>(walk.index.size());
    for (int a = 0; a < m; ++a)
        for (int b = a + 1; b < m; ++b)
            worst = std::max(worst,
                             std::abs(walk.pi(a) * walk.P(a, b) - walk.pi(b) * walk.P(b, a)));
    return worst;
}

double walk_lambda2(const LocalWalk& walk) {
    const int m = static_cast<int>(walk.index.size());
    if (m < 2) throw std::invalid_argument("walk_lambda2: walk too small");
    Eigen::VectorXd sq = walk.pi.cwiseSqrt();
    Eigen::MatrixXd S = sq.asDiagonal() * walk.P * sq.cwiseInverse().asDiagonal();
    S = 0.5 * (S + S.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(S);
    return solver.eigenvalues()(m - 2);
}

double conductance(const LocalWalk& walk, int max_pairs) {
    const int m = static_cast<int>(walk.index.size());
    if (m > max_pairs) throw std::runtime_error("conductance: index too large for exact mode");
    // Q(x,y) = pi(x) P(x,y)
    Eigen::MatrixXd Q = walk.pi.asDiagonal() * walk.P;
    double best = std::numeric_limits<double>::infinity();
    for (uint32_t mask = 1; mask + 1 < (1u << m); ++mask) {
        double pis = 0.0;
        for (int x = 0; x < m; ++x)
            if (mask & (1u << x)) pis += walk.pi(x);
        if (pis > 0.5 + 1e-15 || pis <= 0.0) continue;
        double flow = 0.0;
        for (int x = 0; x < m; ++x) {
            if (!(mask & (1u << x))) continue;
            for (int y = 0; y < m; ++y)
                if (!(mask & (1u << y))) flow += Q(x, y);
        }
        best = std::min(best, flow / pis);
    }
    if (!std::isfinite(best)) throw std::runtime_error("conductance: no admissible cut");
    return best;
}

double conductance_sampled(const LocalWalk& walk, int samples, Rng& rng) {
    const int m = static_cast<int>(walk.index.size());
    if (m < 2) throw std::invalid_argument("conductance_sampled: walk too small");
    Eigen::MatrixXd Q = walk.pi.asDiagonal() * walk.P;
    double best = std::numeric_limits<double>::infinity();
    std::vector<char> in(m);
    for (int t = 0; t < samples; ++t) {
        double pis = 0.0;
        bool nonempty = false, proper = false;
        for (int x = 0; x < m; ++x) {
            in[x] = rng.bernoulli(0.5);
            if (in[x]) {
                pis += walk.pi(x);
                nonempty = true;
            } else {
                proper = true;
            }
        }
        if (!nonempty || !proper) continue;
        if (pis > 0.5) {  // use the lighter side
            for (int x = 0; x < m; ++x) in[x] = !in[x];
            pis = 1.0 - pis;
        }
        double flow = 0.0;
        for (int x = 0; x < m; ++x) {
            if (!in[x]) continue;
            for (int y = 0; y < m; ++y)
                if (!in[y]) flow += Q(x, y);
        }
        best = std::min(best, flow / pis);
    }
    if (!std::isfinite(best)) throw std::runtime_error("conductance_sampled: no admissible cut");
    return best;
}

double bound_glauber_gap(double eta, double b, int n) {
    double c2 = std::ceil(2.0 * eta - 1e-12);
    double base = 2.0 * std::pow(b, 4) / (std::pow(c2 + 2.0, 4) * n);
    return std::pow(base, 1.0 + c2);
}

double bound_c_ubf(double theta, double eta, double b) {
    if (!(theta > 0.0 && theta <= 1.0)) throw std::invalid_argument("bound_c_ubf: bad theta");
    double exponent = std::ceil(2.0 * eta / b - 1e-12);
    return std::pow(std::exp(1.0) / theta, exponent);
}

double bound_kpf_from_gap(double gamma, double b, int n) {
    return 3.0 * n * std::log(1.0 / b) / gamma;
}

double bound_si_from_coupling(double D, double M, double kappa) {
    if (!(kappa < 1.0)) throw std::invalid_argument("bound_si_from_coupling: kappa >= 1");
    return 2.0 * D * M / (1.0 - kappa);
}

ReferenceBounds reference_bounds(double eta, double b, int max_degree, int n, double theta) {
    if (!(b > 0.0 && b <= 1.0)) throw std::invalid_argument("reference_bounds: b outside (0,1]");
    if (eta < 0.0) throw std::invalid_argument("reference_bounds: eta < 0");
    ReferenceBounds rb;
    rb.glauber_gap_lower = bound_glauber_gap(eta, b, n);
    rb.c_ubf = bound_c_ubf(theta, eta, b);
    rb.kappa = 2.0 + std::ceil(2.0 * eta / b - 1e-12);
    double delta = std::max(max_degree, 1);
    double logn = std::max(std::log(static_cast<double>(n)), 1e-12);
    rb.c_kpf_logn = std::pow(std::pow(eta + 1.0, 5) * delta * logn / std::pow(b, 6), rb.kappa);
    rb.c_kpf_delta = std::pow(std::pow(eta + 1.0, 5) * std::pow(delta, 4) / std::pow(b, 6), rb.kappa);
    rb.kpf_flagged = true;
    return rb;
}

}  // namespace spinsi
