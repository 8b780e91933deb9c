#include <doctest.h>

#include <cmath>
#include <memory>

#include "spinsi/spin.hpp"

using namespace spinsi;

namespace {
std::shared_ptr<Graph> edge() { return std::make_shared<Graph>(single_edge_graph()); }
}  // namespace

TEST_CASE("make_model validation") {
    CHECK_THROWS(make_potts(edge(), 1, 0.5));
    CHECK_THROWS(make_hardcore(edge(), 0.0));
    CHECK_THROWS(make_model("nonsense", edge(), 1.0));
}

TEST_CASE("hamiltonian values") {
    // empty graph: H = 0 everywhere for U = 0
    auto iso = std::make_shared<Graph>(build_graph(2, {}));
    SpinSystem free2 = make_ising(iso, 1.3);
    CHECK(free2.hamiltonian({0, 1}) == 0.0);

    // single monochromatic Ising edge: H = -beta
    double beta = 0.7;
    SpinSystem ising = make_ising(edge(), beta);
    CHECK(ising.hamiltonian({1, 1}) == doctest::Approx(-beta));
    CHECK(ising.hamiltonian({0, 1}) == doctest::Approx(0.0));

    // hardcore double occupancy is forbidden exactly
    SpinSystem hc = make_hardcore(edge(), 1.0);
    CHECK(std::isinf(hc.hamiltonian({1, 1})));
    CHECK(hc.hamiltonian({1, 0}) == doctest::Approx(0.0));

    CHECK_THROWS(ising.hamiltonian({0}));      // wrong size
    CHECK_THROWS(ising.hamiltonian({0, 2}));   // spin out of range
}

TEST_CASE("condition folds pinned vertices into fields") {
    double beta = std::log(3.0);
    SpinSystem ising = make_ising(edge(), beta);
    Pinning tau;
    tau.set(0, 1);
    SpinSystem cond = condition(ising, tau);
    CHECK(cond.n() == 1);
    // weight(1)/weight(0) should be e^beta = 3
    double w1 = std::exp(cond.U[0][1]);
    double w0 = std::exp(cond.U[0][0]);
    CHECK(w1 / w0 == doctest::Approx(3.0));

    // hardcore: pinning a neighbor to 1 forbids occupation
    SpinSystem hc = make_hardcore(edge(), 2.0);
    Pinning occ;
    occ.set(0, 1);
    SpinSystem hc_cond = condition(hc, occ);
    CHECK(is_hard(hc_cond.U[0][1]));
    CHECK(hc_cond.U[0][0] == doctest::Approx(0.0));
}

TEST_CASE("uniqueness thresholds") {
    CHECK(uniqueness_threshold("ising", 3) == doctest::Approx(std::log(3.0)));
    CHECK(uniqueness_threshold("ising", 4) == doctest::Approx(std::log(2.0)));
    CHECK(uniqueness_threshold("hardcore", 3) == doctest::Approx(4.0));
    CHECK_THROWS(uniqueness_threshold("ising", 2));
    CHECK_THROWS(uniqueness_threshold("potts", 3));
}

TEST_CASE("spin orders") {
    SpinOrder o = SpinOrder::natural(2, 3);
    CHECK(o.rank(0, 0) == 0);
    CHECK(o.rank(1, 2) == 2);
    CHECK(o.top(0) == 2);
    CHECK(o.bottom(1) == 0);
}

TEST_CASE("conditioning on a null event is rejected") {
    SpinSystem hc = make_hardcore(edge(), 1.0);
    Pinning both;
    both.set(0, 1);
    both.set(1, 1);  // adjacent occupied pair has probability zero
    CHECK_THROWS(condition(hc, both));
}
