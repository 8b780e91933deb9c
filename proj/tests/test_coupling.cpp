#include <doctest.h>

#include <cmath>
#include <memory>

#include "spinsi/coupling.hpp"
#include "spinsi/exact.hpp"

using namespace spinsi;

TEST_CASE("identical coupled states stay identical") {
    auto g = std::make_shared<Graph>(path_graph(4));
    SpinSystem sys = make_ising(g, 0.5);
    SpinOrder order = SpinOrder::natural(4, 2);
    CoupledPair pair;
    pair.upper = {1, 0, 1, 0};
    pair.lower = {1, 0, 1, 0};
    Rng rng(1);
    CouplingKernel kernel = CouplingKernel::scan(ScanOrder::identity(4));
    for (int t = 0; t < 200; ++t) {
        monotone_coupled_step(sys, pair, kernel, order, rng);
        CHECK(pair.hamming() == 0);
    }
}

TEST_CASE("ordering is preserved from the extreme pair") {
    auto g = std::make_shared<Graph>(grid_graph({3, 3}));
    SpinSystem sys = make_ising(g, 0.4);
    SpinOrder order = SpinOrder::natural(9, 2);
    REQUIRE(is_heat_bath_monotone(sys, order));
    CoupledPair pair;
    pair.upper.assign(9, 1);
    pair.lower.assign(9, 0);
    Rng rng(5);
    CouplingKernel kernel = CouplingKernel::scan(ScanOrder::identity(9));
    for (int t = 0; t < 2000; ++t) {
        monotone_coupled_step(sys, pair, kernel, order, rng);  // throws on violation
        CHECK(pair.ordered(order));
    }
}

TEST_CASE("beta=0 scan coalesces in one step") {
    auto g = std::make_shared<Graph>(path_graph(5));
    SpinSystem sys = make_ising(g, 0.0);
    SpinOrder order = SpinOrder::natural(5, 2);
    Rng root(3);
    for (int t = 0; t < 50; ++t) {
        Rng rng = root.split(t);
        CoupledPair pair;
        pair.upper.assign(5, 1);
        pair.lower.assign(5, 0);
        monotone_coupled_step(sys, pair, CouplingKernel::scan(ScanOrder::identity(5)), order, rng);
        CHECK(pair.coalesced());
    }
}

TEST_CASE("coupling time on a single vertex is 1") {
    auto one = std::make_shared<Graph>(build_graph(1, {}));
    SpinSystem sys = make_ising(one, 0.0);
    SpinOrder order = SpinOrder::natural(1, 2);
    Rng rng(4);
    auto ct = coupling_time(sys, CouplingKernel::scan(ScanOrder::identity(1)), order, 50, 0.75,
                            rng, 100);
    CHECK(ct.quantile_step == 1);
    CHECK(ct.censored == 0);
}

TEST_CASE("coupling probability dominates the exact TV distance") {
    // d(t) <= max-over-starts Pr[X_t != Y_t] for the monotone coupling
    auto g = std::make_shared<Graph>(path_graph(3));
    SpinSystem sys = make_ising(g, 0.6);
    GibbsTable tbl = exact_gibbs(sys);
    TransitionMatrix scan = induced_scan(tbl, ScanOrder::identity(3));
    SpinOrder order = SpinOrder::natural(3, 2);
    Rng root(8);
    const int replicas = 4000;
    for (long t : {1L, 2L, 3L}) {
        long not_coalesced = 0;
        for (int r = 0; r < replicas; ++r) {
            Rng rng = root.split(r * 10 + t);
            CoupledPair pair;
            pair.upper.assign(3, 1);
            pair.lower.assign(3, 0);
            for (long s = 0; s < t; ++s)
                monotone_coupled_step(sys, pair, CouplingKernel::scan(ScanOrder::identity(3)),
                                      order, rng);
            if (!pair.coalesced()) ++not_coalesced;
        }
        double phat = static_cast<double>(not_coalesced) / replicas;
        double sigma = std::sqrt(std::max(phat * (1 - phat), 1e-6) / replicas);
        CHECK(tv_distance_at(scan, t) <= phat + 4 * sigma + 1e-9);
    }
}

TEST_CASE("disagreement dies immediately at beta=0") {
    auto g = std::make_shared<Graph>(grid_graph({4, 4}));
    SpinSystem sys = make_ising(g, 0.0);
    std::vector<int> side;
    is_bipartite(*g, &side);
    std::vector<int> evens, odds;
    for (int v = 0; v < g->n; ++v) (side[v] == 0 ? evens : odds).push_back(v);
    Rng rng(6);
    auto rr = disagreement_radius(sys, evens, odds, 4, 500, rng);
    for (int t = 1; t <= 4; ++t) CHECK(rr.max_radius_by_step[t] == 0);
    CHECK(rr.within_three_per_step);
}

TEST_CASE("disagreement radius is bounded by 3 per step") {
    auto g = std::make_shared<Graph>(grid_graph({6, 6}));
    SpinSystem sys = make_ising(g, 0.5);
    std::vector<int> side;
    is_bipartite(*g, &side);
    std::vector<int> evens, odds;
    for (int v = 0; v < g->n; ++v) (side[v] == 0 ? evens : odds).push_back(v);
    Rng rng(7);
    auto rr = disagreement_radius(sys, evens, odds, 4, 2000, rng);
    CHECK(rr.within_three_per_step);
}

TEST_CASE("component tail histogram") {
    // theta = 1: the component of v is its whole graph component
    Graph p8 = path_graph(8);
    Rng rng(9);
    TailHistogram all = component_tail(p8, 1.0, 3, 200, rng);
    CHECK(all.counts[8] == 200);

    // k = 1 slice sits below l/n with fluctuation allowance
    Graph p64 = path_graph(64);
    TailHistogram hist = component_tail(p64, 1.0 / 16, 32, 100000, rng);
    double phat = static_cast<double>(hist.counts[1]) / hist.trials;
    double bound = hist.bound_curve[1];
    CHECK(bound == doctest::Approx(static_cast<double>(hist.ell) / 64));
    CHECK(phat <= bound + 4 * std::sqrt(bound * (1 - bound) / hist.trials));

    // all slices below the curve
    for (int k = 1; k <= 64; ++k) {
        double pk = static_cast<double>(hist.counts[k]) / hist.trials;
        double sigma = std::sqrt(std::max(pk * (1 - pk), 0.0) / hist.trials) + 1e-5;
        CHECK(pk <= hist.bound_curve[k] + 4 * sigma);
    }
}

TEST_CASE("rectangle block contraction cases") {
    auto g = std::make_shared<Graph>(grid_graph({6, 6}));
    SpinSystem sys = make_ising(g, 0.2);
    Rng rng(10);
    auto est = rectangle_block_contraction(sys, 2, 20000, rng);
    CHECK(est.r == 1);
    CHECK(est.mean_in_block == doctest::Approx(0.0));
    CHECK(est.mean_far == doctest::Approx(1.0));
    CHECK(est.count_in_block + est.count_boundary + est.count_far == est.trials);
    CHECK(est.mean < 1.0);

    auto not_grid = std::make_shared<Graph>(cycle_graph(5));
    SpinSystem bad = make_ising(not_grid, 0.2);
    CHECK_THROWS(rectangle_block_contraction(bad, 2, 10, rng));
}

TEST_CASE("experiments are deterministic across thread counts") {
    Graph p32 = path_graph(32);
    Rng r1(55), r4(55);
    TailHistogram h1 = component_tail(p32, 0.125, 16, 5000, r1, 1);
    TailHistogram h4 = component_tail(p32, 0.125, 16, 5000, r4, 4);
    CHECK(h1.counts == h4.counts);
    long total = 0;
    for (long c : h1.counts) total += c;
    CHECK(total == h1.trials);

    auto g = std::make_shared<Graph>(grid_graph({5, 5}));
    SpinSystem sys = make_ising(g, 0.2);
    Rng s1(66), s4(66);
    auto e1 = rectangle_block_contraction(sys, 2, 4000, s1, -1, 1);
    auto e4 = rectangle_block_contraction(sys, 2, 4000, s4, -1, 4);
    CHECK(e1.mean == doctest::Approx(e4.mean).epsilon(1e-15));
    CHECK(e1.count_boundary == e4.count_boundary);

    SpinOrder order = SpinOrder::natural(16, 2);
    auto pg = std::make_shared<Graph>(path_graph(16));
    SpinSystem psys = make_ising(pg, 0.2);
    std::vector<int> evens, odds;
    for (int v = 0; v < 16; ++v) (v % 2 == 0 ? evens : odds).push_back(v);
    Rng c1(77), c4(77);
    auto t1 = coupling_time(psys, CouplingKernel::even_odd(evens, odds), order, 100, 0.75, c1,
                            1000, 1);
    auto t4 = coupling_time(psys, CouplingKernel::even_odd(evens, odds), order, 100, 0.75, c4,
                            1000, 4);
    CHECK(t1.times == t4.times);
}
