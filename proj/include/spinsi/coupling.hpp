#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spinsi/dynamics.hpp"
#include "spinsi/gibbs.hpp"

namespace spinsi {

// Coupled pair of chains under shared randomness.
struct CoupledPair {
    std::vector<uint8_t> upper;
    std::vector<uint8_t> lower;
    long step = 0;

    int hamming() const;
    bool coalesced() const { return upper == lower; }
    bool ordered(const SpinOrder& order) const;  // upper >= lower coordinatewise
};

// Which single-site schedule drives the coupled chains.
struct CouplingKernel {
    enum class Type { Glauber, Scan, EvenOdd } type = Type::Scan;
    ScanOrder phi;                  // Scan
    std::vector<int> evens, odds;   // EvenOdd

    static CouplingKernel glauber();
    static CouplingKernel scan(const ScanOrder& phi);
    static CouplingKernel even_odd(const std::vector<int>& evens, const std::vector<int>& odds);
};

// One coupled step: both chains advance with the same uniforms through the
// shared inverse-CDF heat-bath construction in the declared spin order.
// Throws when an ordered pair leaves the coordinatewise order (monotone
// systems never do).
void monotone_coupled_step(const SpinSystem& sys, CoupledPair& pair, const CouplingKernel& kernel,
                           const SpinOrder& order, Rng& rng, bool assert_ordered = true);

struct CouplingTimeResult {
    std::vector<long> times;      // per-replica coalescence step; budget+1 when censored
    long quantile_step = -1;      // smallest t with fraction coalesced >= quantile
    double quantile_interpolated = 0.0;  // inverse-CDF with within-step interpolation
    long censored = 0;
    double quantile = 0.75;
    long budget = 0;
    std::pair<long, long> bootstrap_ci{0, 0};  // 95% interval for the quantile step
};

CouplingTimeResult coupling_time(const SpinSystem& sys, const CouplingKernel& kernel,
                                 const SpinOrder& order, int replicas, double quantile, Rng& rng,
                                 long budget = 100000, int threads = 1);

struct RadiusResult {
    std::vector<int> max_radius_by_step;  // cumulative max over trials and steps
    bool within_three_per_step = true;
};

// Identity coupling of even-odd steps from a single-vertex disagreement;
// records how far disagreements have traveled by each step.
RadiusResult disagreement_radius(const SpinSystem& sys, const std::vector<int>& evens,
                                 const std::vector<int>& odds, int steps, int trials, Rng& rng,
                                 int start_vertex = -1, int threads = 1);

struct TailHistogram {
    std::vector<long> counts;          // index = |C_S(v)|; 0 means v not in S
    long trials = 0;
    double theta = 0.0;
    int ell = 0;
    std::vector<double> bound_curve;   // (ell/n)(2 e Delta theta)^(k-1) for k >= 1; [0] unused
};

TailHistogram component_tail(const Graph& g, double theta, int v, long trials, Rng& rng,
                             int threads = 1);

struct ContractionEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    long trials = 0;
    long count_in_block = 0, count_boundary = 0, count_far = 0;
    double mean_in_block = 0.0, mean_boundary = 0.0, mean_far = 0.0;
    int r = 1;
};

// One step of the coupled rectangle-block dynamics from single-disagreement
// pairs: same block in both chains; identical conditional sample when the
// block boundary agrees; TV-optimal coupling on the distant set then
// independent completion when the disagreement sits on the boundary.
ContractionEstimate rectangle_block_contraction(const SpinSystem& sys, int L, long trials,
                                                Rng& rng, int r_override = -1, int threads = 1);

}  // namespace spinsi
