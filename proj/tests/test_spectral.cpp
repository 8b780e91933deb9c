#include <doctest.h>

#include <cmath>
#include <memory>

#include "spinsi/exact.hpp"
#include "spinsi/spectral.hpp"

using namespace spinsi;

namespace {
std::shared_ptr<Graph> edge() { return std::make_shared<Graph>(single_edge_graph()); }
}  // namespace

TEST_CASE("influence matrix on the single Ising edge") {
    double beta = std::log(3.0);
    SpinSystem sys = make_ising(edge(), beta);
    GibbsTable tbl = exact_gibbs(sys);
    Pinning empty;
    InfluenceMatrix infl = influence_matrix(tbl, empty);
    REQUIRE(infl.index.size() == 4);
    double expected = 0.5 * std::tanh(beta / 2);  // 1/4 at beta = ln 3
    // entry ((u,1),(v,1)) = mu(v=1|u=1) - mu(v=1) = 3/4 - 1/2
    for (size_t a = 0; a < infl.index.size(); ++a)
        for (size_t b = 0; b < infl.index.size(); ++b) {
            auto [u, su] = infl.index[a];
            auto [v, sv] = infl.index[b];
            if (u == v) {
                CHECK(infl.psi(a, b) == 0.0);
            } else {
                double sign = (su == sv) ? 1.0 : -1.0;
                CHECK(infl.psi(a, b) == doctest::Approx(sign * expected));
            }
        }
    CHECK(top_eigenvalue(infl.psi) == doctest::Approx(std::tanh(beta / 2)));
}

TEST_CASE("influence matrices have zero row sums per target vertex") {
    Rng root(13);
    for (int t = 0; t < 100; ++t) {
        Rng rng = root.split(t);
        auto g = std::make_shared<Graph>(random_gnp(4, 0.5, rng));
        SpinSystem sys = make_ising(g, 0.3 * rng.normal());
        GibbsTable tbl = exact_gibbs(sys);
        Pinning empty;
        InfluenceMatrix infl = influence_matrix(tbl, empty);
        for (size_t a = 0; a < infl.index.size(); ++a) {
            std::vector<double> by_vertex(4, 0.0);
            for (size_t b = 0; b < infl.index.size(); ++b)
                by_vertex[infl.index[b].v] += infl.psi(a, b);
            for (double s : by_vertex) CHECK(std::abs(s) < 1e-12);
        }
    }
}

TEST_CASE("eta on small systems") {
    // empty graph: all conditionals are products, eta = 0
    auto iso = std::make_shared<Graph>(build_graph(3, {}));
    CHECK(eta(make_ising(iso, 0.9)).eta == doctest::Approx(0.0));

    // single edge: eta = tanh(beta/2), attained at the empty pinning
    double beta = std::log(3.0);
    EtaResult er = eta(make_ising(edge(), beta));
    CHECK(er.eta == doctest::Approx(0.5));
    CHECK(er.witness.empty());

    // max includes the empty pinning
    SpinSystem sys = make_ising(std::make_shared<Graph>(path_graph(3)), 0.7);
    GibbsTable tbl = exact_gibbs(sys);
    Pinning empty;
    CHECK(eta(sys).eta >= top_eigenvalue(influence_matrix(tbl, empty).psi) - 1e-12);
}

TEST_CASE("dobrushin matrix") {
    auto iso = std::make_shared<Graph>(build_graph(3, {}));
    CHECK(spectral_norm(dobrushin_matrix(make_ising(iso, 1.0)).entries) ==
          doctest::Approx(0.0));

    double beta = std::log(3.0);
    DobrushinMatrix dob = dobrushin_matrix(make_ising(edge(), beta));
    CHECK(dob.entries(0, 1) == doctest::Approx(std::tanh(beta / 2)));
    CHECK(dob.entries(1, 0) == doctest::Approx(std::tanh(beta / 2)));
    CHECK(dob.entries(0, 0) == 0.0);

    // Ising entries are bounded by |beta|/2, and vanish off the adjacency
    Rng root(19);
    for (int t = 0; t < 30; ++t) {
        Rng rng = root.split(t);
        auto g = std::make_shared<Graph>(random_gnp(4, 0.5, rng));
        double b = 0.4 * std::abs(rng.normal()) + 0.05;
        DobrushinMatrix d = dobrushin_matrix(make_ising(g, b));
        for (int u = 0; u < 4; ++u)
            for (int v = 0; v < 4; ++v) {
                CHECK(d.entries(u, v) <= b / 2 + 1e-12);
                if (u != v && !g->has_edge(u, v)) CHECK(d.entries(u, v) < 1e-12);
            }
    }
}

TEST_CASE("local random walk identity and spectra") {
    // product measure: lambda_2 = 0
    auto iso = std::make_shared<Graph>(build_graph(3, {}));
    SpinSystem prod = make_ising(iso, 0.0);
    GibbsTable ptbl = exact_gibbs(prod);
    Pinning empty;
    LocalWalk pwalk = local_random_walk(ptbl, empty);
    CHECK(std::abs(walk_lambda2(pwalk)) < 1e-12);

    // single edge at beta = ln 3: lambda_2 = 1/2 and the identity holds with
    // n - k - 1 = 1
    double beta = std::log(3.0);
    SpinSystem sys = make_ising(edge(), beta);
    GibbsTable tbl = exact_gibbs(sys);
    LocalWalk walk = local_random_walk(tbl, empty);
    CHECK(walk_lambda2(walk) == doctest::Approx(0.5));
    CHECK(walk_reversibility_residual(walk) < 1e-12);
    InfluenceMatrix infl = influence_matrix(tbl, empty);
    CHECK(top_eigenvalue(infl.psi) ==
          doctest::Approx((walk.free_count - 1) * walk_lambda2(walk)));

    // rows sum to one
    for (int a = 0; a < walk.P.rows(); ++a) CHECK(walk.P.row(a).sum() == doctest::Approx(1.0));

    CHECK_THROWS(local_random_walk(tbl, [] {
                     Pinning tau;
                     tau.set(0, 1);
                     return tau;
                 }()));
}

TEST_CASE("conductance") {
    // two-state symmetric walk: the bottleneck ratio equals the off-diagonal
    // rate under the min-normalized definition
    LocalWalk toy;
    toy.index = {{0, 0}, {1, 0}};
    toy.free_count = 2;
    toy.P = Eigen::MatrixXd(2, 2);
    double p = 0.3;
    toy.P << 1 - p, p, p, 1 - p;
    toy.pi = Eigen::VectorXd(2);
    toy.pi << 0.5, 0.5;
    CHECK(conductance(toy) == doctest::Approx(p));

    // Cheeger direction and the marginal-bound floor on a real system
    SpinSystem sys = make_ising(std::make_shared<Graph>(path_graph(3)), 0.5);
    GibbsTable tbl = exact_gibbs(sys);
    double b = marginal_lower_bound(sys).b;
    Pinning empty;
    LocalWalk walk = local_random_walk(tbl, empty);
    double phi = conductance(walk);
    CHECK(1.0 - walk_lambda2(walk) >= phi * phi / 2 - 1e-12);
    CHECK(phi >= 2 * b * b / (walk.free_count * walk.free_count) - 1e-12);
}

TEST_CASE("prop-style eta bound from the dobrushin norm") {
    Rng root(23);
    int tested = 0;
    for (int t = 0; t < 60 && tested < 20; ++t) {
        Rng rng = root.split(t);
        auto g = std::make_shared<Graph>(random_gnp(4, 0.5, rng));
        SpinSystem sys = make_ising(g, 0.15);
        DobrushinMatrix dob = dobrushin_matrix(sys);
        double norm = spectral_norm(dob.entries);
        if (norm >= 1.0) continue;
        CHECK(eta(sys).eta <= 2.0 / (1.0 - norm) + 1e-9);
        ++tested;
    }
    CHECK(tested >= 10);
}

TEST_CASE("reference bounds") {
    // plug-in value of the gap lower bound at b = 1/2, eta = 1/2, n = 2
    CHECK(bound_glauber_gap(0.5, 0.5, 2) == doctest::Approx(std::pow(1.0 / 1296, 2)));
    // theta = 1, eta <= b/2: exponent 1, bound e
    CHECK(bound_c_ubf(1.0, 0.2, 0.5) == doctest::Approx(std::exp(1.0)));
    // monotone directions: decreasing in n and in eta
    CHECK(bound_glauber_gap(0.5, 0.5, 4) < bound_glauber_gap(0.5, 0.5, 2));
    CHECK(bound_glauber_gap(1.5, 0.5, 4) < bound_glauber_gap(0.5, 0.5, 4));
    // SI from a contractive coupling
    CHECK(bound_si_from_coupling(0.5, 9, 0.75) == doctest::Approx(36.0));
    CHECK_THROWS(bound_si_from_coupling(0.5, 9, 1.0));
    ReferenceBounds rb = reference_bounds(0.5, 0.25, 4, 16, 0.5);
    CHECK(rb.kappa == doctest::Approx(6.0));
    CHECK(rb.kpf_flagged);
    CHECK(rb.c_ubf == doctest::Approx(std::pow(2 * std::exp(1.0), 4)));
}

TEST_CASE("lemma-style gap oracle on a battery of systems") {
    std::vector<SpinSystem> batch;
    batch.push_back(make_ising(edge(), std::log(2.0)));
    batch.push_back(make_ising(std::make_shared<Graph>(path_graph(3)), 0.3));
    batch.push_back(make_potts(std::make_shared<Graph>(cycle_graph(3)), 3, 0.5));
    batch.push_back(make_hardcore(std::make_shared<Graph>(cycle_graph(4)), 1.0));
    for (const auto& sys : batch) {
        GibbsTable tbl = exact_gibbs(sys);
        double gap = spectral_gap(induced_glauber(tbl));
        double b = marginal_lower_bound(sys).b;
        double ev = eta(sys).eta;
        CHECK(gap >= bound_glauber_gap(ev, b, sys.n()) - 1e-12);
    }
}

TEST_CASE("sampled conductance upper-bounds the exact bottleneck") {
    SpinSystem sys = make_ising(std::make_shared<Graph>(cycle_graph(4)), 0.4);
    GibbsTable tbl = exact_gibbs(sys);
    Pinning empty;
    LocalWalk walk = local_random_walk(tbl, empty);
    double exact = conductance(walk);
    Rng rng(31);
    double sampled = conductance_sampled(walk, 2000, rng);
    CHECK(sampled >= exact - 1e-12);
    CHECK(sampled <= 2.0);
}
