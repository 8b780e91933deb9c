#include "spinsi/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "spinsi/parallel.hpp"

namespace spinsi {

int CoupledPair::hamming() const {
    int d = 0;
    for (size_t v = 0; v < upper.size(); ++v)
        if (upper[v] != lower[v]) ++d;
    return d;
}

bool CoupledPair::ordered(const SpinOrder& order) const {
    for (size_t v = 0; v < upper.size(); ++v)
        if (order.rank(static_cast<int>(v), upper[v]) < order.rank(static_cast<int>(v), lower[v]))
            return false;
    return true;
}

CouplingKernel CouplingKernel::glauber() {
    CouplingKernel k;
    k.type = Type::Glauber;
    return k;
}

CouplingKernel CouplingKernel::scan(const ScanOrder& phi) {
    CouplingKernel k;
    k.type = Type::Scan;
    k.phi = phi;
    return k;
}

CouplingKernel CouplingKernel::even_odd(const std::vector<int>& evens,
                                        const std::vector<int>& odds) {
    CouplingKernel k;
    k.type = Type::EvenOdd;
    k.evens = evens;
    k.odds = odds;
    return k;
}

namespace {

// shared-uniform inverse-CDF update of one site in both chains
inline void coupled_site(const SpinSystem& sys, CoupledPair& pair, int v, double u01,
                         const SpinOrder& order) {
    update_site(sys, pair.upper, v, u01, &order);
    update_site(sys, pair.lower, v, u01, &order);
}

}  // namespace

void monotone_coupled_step(const SpinSystem& sys, CoupledPair& pair, const CouplingKernel& kernel,
                           const SpinOrder& order, Rng& rng, bool assert_ordered) {
    const bool was_ordered = !assert_ordered || pair.ordered(order);
    switch (kernel.type) {
        case CouplingKernel::Type::Glauber: {
            int v = rng.uniform_int(sys.n());
            coupled_site(sys, pair, v, rng.uniform01(), order);
            break;
        }
        case CouplingKernel::Type::Scan: {
            const auto& phi = kernel.phi.order;
            for (size_t i = 0; i < phi.size(); ++i)
                coupled_site(sys, pair, phi[i], rng.uniform01(), order);
            for (size_t i = phi.size(); i-- > 0;)
                coupled_site(sys, pair, phi[i], rng.uniform01(), order);
            break;
        }
        case CouplingKernel::Type::EvenOdd: {
            for (int v : kernel.evens) coupled_site(sys, pair, v, rng.uniform01(), order);
            for (int v : kernel.odds) coupled_site(sys, pair, v, rng.uniform01(), order);
            for (int v : kernel.evens) coupled_site(sys, pair, v, rng.uniform01(), order);
            break;
        }
    }
    ++pair.step;
    if (assert_ordered && was_ordered && !pair.ordered(order))
        throw std::logic_error("monotone_coupled_step: ordering violated");
}

CouplingTimeResult coupling_time(const SpinSystem& sys, const CouplingKernel& kernel,
                                 const SpinOrder& order, int replicas, double quantile, Rng& rng,
                                 long budget, int threads) {
    CouplingTimeResult result;
    result.quantile = quantile;
    result.budget = budget;
    result.times.assign(replicas, budget + 1);
    parallel_for(replicas, threads, [&](long r) {
        Rng sub = rng.split(static_cast<uint64_t>(r));
        CoupledPair pair;
        pair.upper.assign(sys.n(), 0);
        pair.lower.assign(sys.n(), 0);
        for (int v = 0; v < sys.n(); ++v) {
            pair.upper[v] = static_cast<uint8_t>(order.top(v));
            pair.lower[v] = static_cast<uint8_t>(order.bottom(v));
        }
        for (long t = 1; t <= budget; ++t) {
            monotone_coupled_step(sys, pair, kernel, order, sub);
            if (pair.coalesced()) {
                result.times[r] = t;
                return;
            }
        }
    });
    for (long t : result.times)
        if (t > budget) ++result.censored;
    auto quantile_of = [&](std::vector<long> ts) {
        std::sort(ts.begin(), ts.end());
        size_t need = static_cast<size_t>(std::ceil(quantile * ts.size()));
        need = std::min(std::max<size_t>(need, 1), ts.size());
        return ts[need - 1];
    };
    result.quantile_step = quantile_of(result.times);
    {
        // inverse empirical CDF with linear interpolation inside the step at
        // which the quantile is crossed (coalescence happens mid-step; the
        // integer step count censors it to the step boundary)
        long tq = result.quantile_step;
        double below = 0.0, at = 0.0;
        for (long t : result.times) {
            if (t < tq) ++below;
            if (t <= tq) ++at;
        }
        below /= static_cast<double>(result.times.size());
        at /= static_cast<double>(result.times.size());
        result.quantile_interpolated =
            at > below ? (tq - 1) + (quantile - below) / (at - below) : static_cast<double>(tq);
    }
    // bootstrap interval for the quantile estimate
    Rng boot = rng.split(0x0b00u);
    std::vector<long> stats;
    for (int b = 0; b < 200; ++b) {
        std::vector<long> sample(result.times.size());
        for (auto& s : sample) s = result.times[boot.uniform_int(static_cast<int>(result.times.size()))];
        stats.push_back(quantile_of(sample));
    }
    std::sort(stats.begin(), stats.end());
    result.bootstrap_ci = {stats[static_cast<size_t>(0.025 * stats.size())],
                           stats[static_cast<size_t>(0.975 * stats.size()) - 1]};
    return result;
}

RadiusResult disagreement_radius(const SpinSystem& sys, const std::vector<int>& evens,
                                 const std::vector<int>& odds, int steps, int trials, Rng& rng,
                                 int start_vertex, int threads) {
    const Graph& g = *sys.graph;
    if (start_vertex < 0) {
        // a disagreement planted in the first-updated class dies in the first
        // sweep; the odd-class vertex nearest the middle is the worst case
        start_vertex = odds.empty() ? g.n / 2 : odds[0];
        for (int v : odds)
            if (std::abs(v - g.n / 2) < std::abs(start_vertex - g.n / 2)) start_vertex = v;
    }
    auto dist = bfs_distances(g, start_vertex);
    RadiusResult result;
    result.max_radius_by_step.assign(steps + 1, 0);
    std::vector<std::vector<int>> per_trial(trials, std::vector<int>(steps + 1, 0));
    parallel_for(trials, threads, [&](long trial) {
        Rng sub = rng.split(static_cast<uint64_t>(trial));
        ChainState base = random_state(sys, sub);
        CoupledPair pair;
        pair.upper = base.config;
        pair.lower = base.config;
        pair.lower[start_vertex] =
            static_cast<uint8_t>((pair.lower[start_vertex] + 1) % sys.q);
        SpinOrder order = SpinOrder::natural(sys.n(), sys.q);
        CouplingKernel kernel = CouplingKernel::even_odd(evens, odds);
        int running_max = 0;
        for (int t = 1; t <= steps; ++t) {
            monotone_coupled_step(sys, pair, kernel, order, sub, /*assert_ordered=*/false);
            for (int v = 0; v < g.n; ++v)
                if (pair.upper[v] != pair.lower[v] && dist[v] > running_max) running_max = dist[v];
            per_trial[trial][t] = running_max;
        }
    });
    for (int t = 0; t <= steps; ++t)
        for (int trial = 0; trial < trials; ++trial)
            result.max_radius_by_step[t] =
                std::max(result.max_radius_by_step[t], per_trial[trial][t]);
    for (int t = 1; t <= steps; ++t)
        if (result.max_radius_by_step[t] > 3 * t) result.within_three_per_step = false;
    return result;
}

TailHistogram component_tail(const Graph& g, double theta, int v, long trials, Rng& rng,
                             int threads) {
    if (!(theta > 0.0 && theta <= 1.0))
        throw std::invalid_argument("component_tail: theta outside (0,1]");
    const int n = g.n;
    const int ell = static_cast<int>(std::ceil(theta * n));
    TailHistogram hist;
    hist.trials = trials;
    hist.theta = theta;
    hist.ell = ell;
    std::vector<std::vector<long>> chunk_counts;
    // fixed chunk grid: substreams depend on the chunk index only, so any
    // thread count produces the identical histogram
    const int chunks = static_cast<int>(std::min<long>(trials, 64));
    chunk_counts.assign(chunks, std::vector<long>(n + 1, 0));
    const long per_chunk = (trials + chunks - 1) / chunks;
    parallel_for(chunks, threads, [&](long c) {
        Rng sub = rng.split(static_cast<uint64_t>(c));
        std::vector<int> perm(n);
        std::vector<char> in_s(n, 0);
        std::vector<int> stack;
        long lo = c * per_chunk, hi = std::min<long>(trials, (c + 1) * per_chunk);
        for (long t = lo; t < hi; ++t) {
            std::iota(perm.begin(), perm.end(), 0);
            for (int i = 0; i < ell; ++i) {
                int j = i + sub.uniform_int(n - i);
                std::swap(perm[i], perm[j]);
            }
            std::fill(in_s.begin(), in_s.end(), 0);
            for (int i = 0; i < ell; ++i) in_s[perm[i]] = 1;
            int size = 0;
            if (in_s[v]) {
                stack.assign(1, v);
                std::vector<char> seen(n, 0);
                seen[v] = 1;
                while (!stack.empty()) {
                    int x = stack.back();
                    stack.pop_back();
                    ++size;
                    for (int u : g.adjacency[x])
                        if (in_s[u] && !seen[u]) {
                            seen[u] = 1;
                            stack.push_back(u);
                        }
                }
            }
            ++chunk_counts[c][size];
        }
    });
    hist.counts.assign(n + 1, 0);
    for (const auto& cc : chunk_counts)
        for (int k = 0; k <= n; ++k) hist.counts[k] += cc[k];
    hist.bound_curve.assign(n + 1, 0.0);
    const double base = 2.0 * std::exp(1.0) * g.max_degree * theta;
    for (int k = 1; k <= n; ++k)
        hist.bound_curve[k] = (static_cast<double>(ell) / n) * std::pow(base, k - 1);
    return hist;
}

namespace {

struct GridGeometry {
    std::vector<std::vector<int>> coords;  // per vertex
    std::vector<int> dims;

    static GridGeometry from(const Graph& g) {
        if (!g.is_grid())
            throw std::invalid_argument("rectangle_block_contraction: graph is not a grid");
        GridGeometry geo;
        geo.dims = g.grid_dims;
        const int d = static_cast<int>(geo.dims.size());
        std::vector<long> stride(d, 1);
        for (int i = d - 2; i >= 0; --i) stride[i] = stride[i + 1] * geo.dims[i + 1];
        geo.coords.assign(g.n, std::vector<int>(d, 0));
        for (int v = 0; v < g.n; ++v) {
            long rem = v;
            for (int a = 0; a < d; ++a) {
                geo.coords[v][a] = static_cast<int>(rem / stride[a]);
                rem %= stride[a];
            }
        }
        return geo;
    }

    int linf(int u, int v) const {
        int best = 0;
        for (size_t a = 0; a < dims.size(); ++a)
            best = std::max(best, std::abs(coords[u][a] - coords[v][a]));
        return best;
    }
};

// conditional distribution over assignments of `region`, mixed radix over
// region positions, natural spin order
void region_conditional(const SpinSystem& sys, const std::vector<uint8_t>& sigma,
                        const std::vector<int>& region, std::vector<double>& probs) {
    const int q = sys.q;
    const int m = static_cast<int>(region.size());
    uint64_t total = 1;
    for (int i = 0; i < m; ++i) total *= static_cast<uint64_t>(q);
    if (total > (1u << 25))
        throw std::runtime_error("rectangle_block_contraction: block conditional too large");
    std::vector<char> in_region(sys.n(), 0);
    std::vector<int> slot(sys.n(), -1);
    for (int i = 0; i < m; ++i) {
        in_region[region[i]] = 1;
        slot[region[i]] = i;
    }
    probs.assign(total, 0.0);
    std::vector<int> assign(m, 0);
    double best = kHardConstraint;
    std::vector<double> logw(total, kHardConstraint);
    for (uint64_t code = 0; code < total; ++code) {
        uint64_t rem = code;
        for (int i = 0; i < m; ++i) {
            assign[i] = static_cast<int>(rem % q);
            rem /= q;
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
                    if (u < v) continue;
                    k = sys.k_entry(s, assign[slot[u]]);
                } else {
                    k = sys.k_entry(s, sigma[u]);
                }
                acc = is_hard(k) ? kHardConstraint : acc + k;
            }
        }
        logw[code] = acc;
        if (!is_hard(acc) && (is_hard(best) || acc > best)) best = acc;
    }
    if (is_hard(best))
        throw std::runtime_error("rectangle_block_contraction: empty block conditional");
    double z = 0.0;
    for (uint64_t code = 0; code < total; ++code)
        if (!is_hard(logw[code])) {
            probs[code] = std::exp(logw[code] - best);
            z += probs[code];
        }
    for (double& p : probs) p /= z;
}

uint64_t sample_from(const std::vector<double>& probs, double u01) {
    double cdf = 0.0;
    for (size_t i = 0; i < probs.size(); ++i) {
        cdf += probs[i];
        if (u01 <= cdf) return i;
    }
    return probs.size() - 1;
}

// write the mixed-radix `code` over `verts` (position 0 least significant)
void assign_code(const std::vector<int>& verts, uint64_t code, int q, std::vector<uint8_t>& sigma) {
    for (int v : verts) {
        sigma[v] = static_cast<uint8_t>(code % q);
        code /= static_cast<uint64_t>(q);
    }
}

// marginal over sub_verts of the conditional distribution of `region` given
// the rest of sigma; same mixed-radix convention as region_conditional
void marginal_on(const SpinSystem& sys, const std::vector<uint8_t>& sigma,
                 const std::vector<int>& region, const std::vector<int>& sub_verts,
                 std::vector<double>& out) {
    std::vector<double> full;
    region_conditional(sys, sigma, region, full);
    std::vector<int> slot(sys.n(), -1);
    for (size_t i = 0; i < region.size(); ++i) slot[region[i]] = static_cast<int>(i);
    uint64_t sub_total = 1;
    for (size_t i = 0; i < sub_verts.size(); ++i) sub_total *= static_cast<uint64_t>(sys.q);
    out.assign(sub_total, 0.0);
    const int q = sys.q;
    for (uint64_t code = 0; code < full.size(); ++code) {
        if (full[code] == 0.0) continue;
        uint64_t sub_code = 0;
        uint64_t radix = 1;
        for (int v : sub_verts) {
            uint64_t rem = code;
            for (int i = 0; i < slot[v]; ++i) rem /= q;
            sub_code += (rem % q) * radix;
            radix *= q;
        }
        out[sub_code] += full[code];
    }
}

}  // namespace

ContractionEstimate rectangle_block_contraction(const SpinSystem& sys, int L, long trials,
                                                Rng& rng, int r_override, int threads) {
    const Graph& g = *sys.graph;
    GridGeometry geo = GridGeometry::from(g);
    const int d = static_cast<int>(geo.dims.size());
    if (L < 1 || L > 3) throw std::invalid_argument("rectangle_block_contraction: L must be in [1,3]");

    int r = r_override;
    if (r < 0) {
        double formula = 0.5 * std::pow(static_cast<double>(L) / d, 1.0 / (2.0 * d));
        r = std::max(1, static_cast<int>(std::llround(formula)));
    }

    // blocks and their external boundaries
    std::vector<std::vector<int>> blocks(g.n), boundaries(g.n);
    for (int v = 0; v < g.n; ++v) {
        std::vector<char> in_b(g.n, 0);
        for (int w = 0; w < g.n; ++w)
            if (geo.linf(w, v) < L) {
                blocks[v].push_back(w);
                in_b[w] = 1;
            }
        if (static_cast<int>(blocks[v].size()) > 25)
            throw std::runtime_error("rectangle_block_contraction: block exceeds 25 vertices");
        std::vector<char> on_bd(g.n, 0);
        for (int w : blocks[v])
            for (int u : g.adjacency[w])
                if (!in_b[u]) on_bd[u] = 1;
        for (int u = 0; u < g.n; ++u)
            if (on_bd[u]) boundaries[v].push_back(u);
    }
    auto dist_all = [&](int u) { return bfs_distances(g, u); };

    struct Tally {
        double sum = 0.0, sumsq = 0.0;
        long in_block = 0, boundary = 0, far = 0;
        double sum_in = 0.0, sum_bd = 0.0, sum_far = 0.0;
    };
    const int chunks = static_cast<int>(std::min<long>(trials, 64));
    std::vector<Tally> tallies(chunks);
    const long per_chunk = (trials + chunks - 1) / chunks;

    parallel_for(chunks, threads, [&](long c) {
        Rng sub = rng.split(static_cast<uint64_t>(c) + 7777);
        Tally& tl = tallies[c];
        std::vector<double> pX, pY, mins;
        long lo = c * per_chunk, hi = std::min<long>(trials, (c + 1) * per_chunk);
        for (long t = lo; t < hi; ++t) {
            ChainState x0 = random_state(sys, sub);
            int u = sub.uniform_int(g.n);
            std::vector<uint8_t> y0 = x0.config;
            y0[u] = static_cast<uint8_t>((y0[u] + 1) % sys.q);
            int center = sub.uniform_int(g.n);
            const auto& block = blocks[center];
            bool u_in_block = geo.linf(u, center) < L;
            bool u_on_boundary = false;
            if (!u_in_block)
                for (int w : boundaries[center])
                    if (w == u) {
                        u_on_boundary = true;
                        break;
                    }
            double dval;
            if (u_in_block) {
                dval = 0.0;  // identical boundaries, identical sample, u resampled
                tl.in_block++;
                tl.sum_in += dval;
            } else if (!u_on_boundary) {
                dval = 1.0;  // identical boundaries again; only u still differs
                tl.far++;
                tl.sum_far += dval;
            } else {
                // distant set B = {w in block : dist(w, u) >= r}
                auto du = dist_all(u);
                std::vector<int> b_verts, rest;
                for (int w : block)
                    (du[w] >= r ? b_verts : rest).push_back(w);
                std::vector<uint8_t> x1 = x0.config, y1 = y0;
                if (!b_verts.empty()) {
                    // TV-optimal coupling of the two marginals on B
                    std::vector<double> margX, margY;
                    marginal_on(sys, x0.config, block, b_verts, margX);
                    marginal_on(sys, y0, block, b_verts, margY);
                    mins.resize(margX.size());
                    double common = 0.0;
                    for (size_t i = 0; i < margX.size(); ++i) {
                        mins[i] = std::min(margX[i], margY[i]);
                        common += mins[i];
                    }
                    double u01 = sub.uniform01();
                    uint64_t cx, cy;
                    if (u01 < common) {
                        for (double& w : mins) w /= common;
                        cx = cy = sample_from(mins, sub.uniform01());
                    } else {
                        std::vector<double> rx(margX.size()), ry(margY.size());
                        for (size_t i = 0; i < margX.size(); ++i) {
                            rx[i] = std::max(margX[i] - mins[i], 0.0);
                            ry[i] = std::max(margY[i] - mins[i], 0.0);
                        }
                        double zx = 0.0, zy = 0.0;
                        for (double w : rx) zx += w;
                        for (double w : ry) zy += w;
                        for (double& w : rx) w /= zx;
                        for (double& w : ry) w /= zy;
                        cx = sample_from(rx, sub.uniform01());
                        cy = sample_from(ry, sub.uniform01());
                    }
                    assign_code(b_verts, cx, sys.q, x1);
                    assign_code(b_verts, cy, sys.q, y1);
                }
                if (!rest.empty()) {
                    // independent completion on block \ B
                    region_conditional(sys, x1, rest, pX);
                    region_conditional(sys, y1, rest, pY);
                    assign_code(rest, sample_from(pX, sub.uniform01()), sys.q, x1);
                    assign_code(rest, sample_from(pY, sub.uniform01()), sys.q, y1);
                }
                int dh = 0;
                for (int w = 0; w < g.n; ++w)
                    if (x1[w] != y1[w]) ++dh;
                dval = dh;
                tl.boundary++;
                tl.sum_bd += dval;
            }
            tl.sum += dval;
            tl.sumsq += dval * dval;
        }
    });

    ContractionEstimate est;
    est.trials = trials;
    est.r = r;
    double sum = 0.0, sumsq = 0.0;
    for (const auto& tl : tallies) {
        sum += tl.sum;
        sumsq += tl.sumsq;
        est.count_in_block += tl.in_block;
        est.count_boundary += tl.boundary;
        est.count_far += tl.far;
        est.mean_in_block += tl.sum_in;
        est.mean_boundary += tl.sum_bd;
        est.mean_far += tl.sum_far;
    }
    est.mean = sum / trials;
    double var = std::max(sumsq / trials - est.mean * est.mean, 0.0);
    est.std_error = std::sqrt(var / trials);
    if (est.count_in_block) est.mean_in_block /= est.count_in_block;
    if (est.count_boundary) est.mean_boundary /= est.count_boundary;
    if (est.count_far) est.mean_far /= est.count_far;
    return est;
}

}  // namespace spinsi
