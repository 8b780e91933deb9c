#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <memory>

#include "spinsi/gibbs.hpp"

using namespace spinsi;

namespace {
std::shared_ptr<Graph> edge() { return std::make_shared<Graph>(single_edge_graph()); }
std::shared_ptr<Graph> path(int n) { return std::make_shared<Graph>(path_graph(n)); }
}  // namespace

TEST_CASE("exact_gibbs on the single Ising edge") {
    SpinSystem sys = make_ising(edge(), std::log(2.0));
    GibbsTable tbl = exact_gibbs(sys);
    CHECK(tbl.size() == 4);
    // weights 2,1,1,2 -> probabilities 1/3, 1/6, 1/6, 1/3
    CHECK(tbl.prob_of(tbl.space.encode({0, 0})) == doctest::Approx(1.0 / 3));
    CHECK(tbl.prob_of(tbl.space.encode({1, 0})) == doctest::Approx(1.0 / 6));
    CHECK(tbl.prob_of(tbl.space.encode({0, 1})) == doctest::Approx(1.0 / 6));
    CHECK(tbl.prob_of(tbl.space.encode({1, 1})) == doctest::Approx(1.0 / 3));
    double total = 0.0;
    for (double p : tbl.probs) total += p;
    CHECK(std::abs(total - 1.0) < 1e-12);
}

TEST_CASE("exact_gibbs uniform cases and the cap") {
    auto iso2 = std::make_shared<Graph>(build_graph(2, {}));
    SpinSystem potts = make_potts(iso2, 3, 1.0);
    GibbsTable tbl = exact_gibbs(potts);
    CHECK(tbl.size() == 9);
    for (double p : tbl.probs) CHECK(p == doctest::Approx(1.0 / 9));

    SpinSystem hc = make_hardcore(edge(), 1.0);
    GibbsTable hct = exact_gibbs(hc);
    CHECK(hct.size() == 3);  // {00, 01, 10}
    for (double p : hct.probs) CHECK(p == doctest::Approx(1.0 / 3));

    CHECK_THROWS(exact_gibbs(make_ising(path(30), 0.1), 1 << 10));
}

TEST_CASE("conditionals match reduced systems for every pinning") {
    // exact_gibbs(condition(sys, tau)) == condition_table(exact_gibbs(sys), tau)
    for (int which = 0; which < 2; ++which) {
        SpinSystem sys = which == 0 ? make_ising(path(3), 0.4)
                                    : make_hardcore(std::make_shared<Graph>(cycle_graph(4)), 1.5);
        GibbsTable full = exact_gibbs(sys);
        for_each_pinning(full, sys.n() - 1, 1, [&](const Pinning& tau) {
            if (tau.empty()) return;
            std::vector<int> keep;
            SpinSystem reduced = condition(sys, tau, &keep);
            GibbsTable direct = exact_gibbs(reduced);
            GibbsTable sliced = condition_table(full, tau);
            REQUIRE(direct.size() == sliced.size());
            for (int i = 0; i < sliced.size(); ++i) {
                // map the sliced full-space state onto the reduced indexing
                std::vector<uint8_t> sub(keep.size());
                for (size_t j = 0; j < keep.size(); ++j)
                    sub[j] = static_cast<uint8_t>(sliced.space.spin_of(sliced.states[i], keep[j]));
                double p_direct = direct.prob_of(direct.space.encode(sub));
                CHECK(std::abs(p_direct - sliced.probs[i]) < 1e-12);
            }
        });
    }
}

TEST_CASE("marginals") {
    double beta = std::log(3.0);
    SpinSystem sys = make_ising(edge(), beta);
    GibbsTable tbl = exact_gibbs(sys);
    // spin-flip symmetry: mu(v = 1) = 1/2
    auto m = marginal(tbl, {1});
    CHECK(m[{1}] == doctest::Approx(0.5));
    // conditioned on u = 1: mu(v = 1) = e^b/(e^b+1) = 3/4
    Pinning tau;
    tau.set(0, 1);
    GibbsTable cond = condition_table(tbl, tau);
    auto mc = marginal(cond, {1});
    CHECK(mc[{1}] == doctest::Approx(0.75));
    // full vertex set: the table itself
    auto all = marginal(tbl, {0, 1});
    CHECK(all.size() == 4);
    CHECK(all[{1, 1}] == doctest::Approx(tbl.prob_of(tbl.space.encode({1, 1}))));
}

TEST_CASE("marginal_lower_bound with witness") {
    // single free vertex: b = 1/2 by symmetry
    auto one = std::make_shared<Graph>(build_graph(1, {}));
    CHECK(marginal_lower_bound(make_ising(one, 0.7)).b == doctest::Approx(0.5));

    // Ising edge beta = ln 2: worst pinning gives 1/3
    MarginalBound mb = marginal_lower_bound(make_ising(edge(), std::log(2.0)));
    CHECK(mb.b == doctest::Approx(1.0 / 3));
    CHECK(mb.witness_vertex >= 0);

    // witness re-check: conditional at the witness attains b
    SpinSystem sys = make_ising(path(3), 0.8);
    MarginalBound w = marginal_lower_bound(sys);
    GibbsTable full = exact_gibbs(sys);
    GibbsTable slice = w.witness_pinning.empty() ? full : condition_table(full, w.witness_pinning);
    auto probs = single_marginals(slice);
    CHECK(probs[w.witness_vertex][w.witness_spin] == doctest::Approx(w.b));

    // Potts with beta <= 2/Delta is at least 1/(q e^2)-marginally bounded
    SpinSystem potts = make_potts(std::make_shared<Graph>(cycle_graph(4)), 3, 0.5);
    CHECK(marginal_lower_bound(potts).b >= 1.0 / (3 * std::exp(2.0)));
}

TEST_CASE("totally connected predicate") {
    CHECK(is_totally_connected(make_ising(path(3), 0.5)));
    CHECK(is_totally_connected(make_hardcore(std::make_shared<Graph>(cycle_graph(4)), 1.0)));
    // proper 2-coloring of an edge: support {01, 10} is flip-disconnected
    SpinSystem pc = make_potts(edge(), 2, 0.0);
    pc.set_k(0, 0, kHardConstraint);
    pc.set_k(1, 1, kHardConstraint);
    CHECK(!is_totally_connected(pc));
}

TEST_CASE("monotonicity") {
    SpinOrder natural2 = SpinOrder::natural(2, 2);
    CHECK(is_monotone(make_ising(edge(), 0.8), natural2));
    CHECK(is_heat_bath_monotone(make_ising(edge(), 0.8), natural2));

    // antiferromagnetic Ising on an edge is not monotone in the shared order
    SpinSystem anti = make_ising(edge(), -0.8);
    CHECK(!is_monotone(anti, natural2));
    CHECK(!is_heat_bath_monotone(anti, natural2));

    // hardcore on a bipartite graph with the order flipped on one side
    auto c4 = std::make_shared<Graph>(cycle_graph(4));
    SpinSystem hc = make_hardcore(c4, 1.3);
    SpinOrder flipped = SpinOrder::natural(4, 2);
    std::vector<int> side;
    is_bipartite(*c4, &side);
    for (int v = 0; v < 4; ++v)
        if (side[v] == 1) flipped.order[v] = {1, 0};
    flipped.build_ranks();
    CHECK(is_monotone(hc, flipped));
    CHECK(is_heat_bath_monotone(hc, flipped));
    // ... but not in the unflipped order
    SpinOrder plain = SpinOrder::natural(4, 2);
    CHECK(!is_monotone(hc, plain));

    // invariant under reversing every per-vertex order
    SpinOrder reversed = SpinOrder::natural(2, 2);
    for (auto& ord : reversed.order) std::reverse(ord.begin(), ord.end());
    reversed.build_ranks();
    CHECK(is_monotone(make_ising(edge(), 0.8), reversed));
    CHECK(!is_monotone(anti, reversed));
}

TEST_CASE("spin permutation symmetry of Potts tables") {
    auto g = std::make_shared<Graph>(cycle_graph(4));
    SpinSystem potts = make_potts(g, 3, 0.7);
    GibbsTable tbl = exact_gibbs(potts);
    // relabeling all spins by 0 -> 1 -> 2 -> 0 fixes every probability
    for (int i = 0; i < tbl.size(); ++i) {
        auto sigma = tbl.space.decode(tbl.states[i]);
        for (auto& s : sigma) s = static_cast<uint8_t>((s + 1) % 3);
        CHECK(tbl.prob_of(tbl.space.encode(sigma)) == doctest::Approx(tbl.probs[i]));
    }
}

TEST_CASE("potts single-edge weights and the empty pinning") {
    // q = 3, beta = 1: monochromatic pairs carry weight e, the rest weight 1
    SpinSystem potts = make_potts(edge(), 3, 1.0);
    GibbsTable tbl = exact_gibbs(potts);
    double z = 3 * std::exp(1.0) + 6;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            double expect = (a == b ? std::exp(1.0) : 1.0) / z;
            CHECK(tbl.prob_of(tbl.space.encode({static_cast<uint8_t>(a),
                                                static_cast<uint8_t>(b)})) ==
                  doctest::Approx(expect));
        }
    // ising beta = 0 is the product of uniform spins
    GibbsTable uni = exact_gibbs(make_ising(edge(), 0.0));
    for (double p : uni.probs) CHECK(p == doctest::Approx(0.25));

    // conditioning on the empty pinning changes nothing
    Pinning none;
    SpinSystem same = condition(make_ising(edge(), 0.7), none);
    GibbsTable a = exact_gibbs(make_ising(edge(), 0.7));
    GibbsTable b = exact_gibbs(same);
    REQUIRE(a.size() == b.size());
    for (int i = 0; i < a.size(); ++i) CHECK(a.probs[i] == doctest::Approx(b.probs[i]));
}
