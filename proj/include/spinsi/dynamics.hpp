#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spinsi/gibbs.hpp"
#include "spinsi/rng.hpp"
#include "spinsi/spin.hpp"

namespace spinsi {

struct ChainState {
    std::vector<uint8_t> config;
    long step_count = 0;
};

struct ScanOrder {
    std::vector<int> order;  // permutation of [0, n)

    static ScanOrder identity(int n);
    bool valid(int n) const;
};

// Blocks covering V with selection weights alpha.
struct BlockSpec {
    std::vector<std::vector<int>> blocks;
    std::vector<double> weights;

    static BlockSpec singletons(int n);
    static BlockSpec from_partition(const IndependentPartition& part);
    void validate(int n) const;
    double alpha_min(int n) const;  // min over v of sum of weights of blocks containing v
};

// Joint spin-edge configuration; every retained edge is monochromatic.
struct JointState {
    std::vector<uint8_t> spins;
    std::vector<int> edges;  // indices into graph.edges
};

// Exact heat-bath resample of `region` from the conditional given the rest.
// Uses inverse-CDF in the given spin order (shared-randomness monotone
// construction for single sites). cap limits q^|region|.
ChainState heat_bath_update(const SpinSystem& sys, const ChainState& state,
                            const std::vector<int>& region, Rng& rng,
                            const SpinOrder* order = nullptr,
                            uint64_t cap_states = kDefaultStateCap);

// Conditional spin distribution at v given the rest of sigma; w[r] is the
// probability of the spin of rank r (natural order when order is null).
void site_conditional(const SpinSystem& sys, const std::vector<uint8_t>& sigma, int v,
                      const SpinOrder* order, std::vector<double>& w);

// Smallest index r with cumulative weight >= u01.
int pick_by_cdf(const std::vector<double>& w, double u01);

// In-place single-site heat-bath update with an externally supplied uniform;
// the shared-uniform inverse-CDF used by every coupling.
void update_site(const SpinSystem& sys, std::vector<uint8_t>& sigma, int v, double u01,
                 const SpinOrder* order = nullptr);

ChainState glauber_step(const SpinSystem& sys, const ChainState& state, Rng& rng);

// Symmetrized systematic scan: updates at phi(1..n) then phi(n..1).
ChainState scan_step(const SpinSystem& sys, const ChainState& state, const ScanOrder& phi,
                     Rng& rng);

// One-directional scan (no reversibility guarantee), behind its own entry point.
ChainState scan_step_oneway(const SpinSystem& sys, const ChainState& state, const ScanOrder& phi,
                            Rng& rng);

// Even-odd scan on a bipartition. Default runs the collapsed E,O,E sweeps;
// literal_four_sweeps runs the E,O,O,E form verbatim.
ChainState even_odd_scan_step(const SpinSystem& sys, const ChainState& state,
                              const std::vector<int>& evens, const std::vector<int>& odds,
                              Rng& rng, bool literal_four_sweeps = false);

ChainState block_step(const SpinSystem& sys, const ChainState& state, const BlockSpec& spec,
                      Rng& rng, uint64_t cap_states = kDefaultStateCap);

// Swendsen-Wang step for ferromagnetic Potts/Ising without pinning:
// percolation on monochromatic edges with p = 1 - exp(-beta), then a uniform
// color per component.
ChainState sw_step(const SpinSystem& sys, const ChainState& state, Rng& rng);

// Edge half of the joint resampling: A | sigma.
JointState es_sample_edges(const SpinSystem& sys, const std::vector<uint8_t>& sigma, Rng& rng);

// Spin half: uniform independent color per component of (V, A).
JointState es_sample_spins(const SpinSystem& sys, const std::vector<int>& edge_subset, Rng& rng);

// Requires Potts-form system (Ising counts), no folded pinning, beta >= 0.
void require_sw_applicable(const SpinSystem& sys);

double sw_percolation_probability(const SpinSystem& sys);

ChainState random_state(const SpinSystem& sys, Rng& rng);
ChainState constant_state(const SpinSystem& sys, int spin);

}  // namespace spinsi
