#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "spinsi/dynamics.hpp"
#include "spinsi/gibbs.hpp"
#include "spinsi/poset.hpp"

namespace spinsi {

// Row-stochastic matrix over an enumerated support, stationary mu attached.
struct TransitionMatrix {
    GibbsTable table;  // states and stationary probabilities
    Eigen::MatrixXd P;
    std::string kernel_name;

    int size() const { return table.size(); }
    Eigen::VectorXd stationary() const;
};

TransitionMatrix site_kernel(const GibbsTable& tbl, int v);
TransitionMatrix block_kernel(const GibbsTable& tbl, const std::vector<int>& block);

TransitionMatrix induced_glauber(const GibbsTable& tbl);
TransitionMatrix induced_scan(const GibbsTable& tbl, const ScanOrder& phi);
TransitionMatrix induced_scan_oneway(const GibbsTable& tbl, const ScanOrder& phi);
TransitionMatrix induced_even_odd(const GibbsTable& tbl, const Graph& g,
                                  const std::vector<int>& evens, const std::vector<int>& odds,
                                  bool literal_four_sweeps = false);
TransitionMatrix induced_block(const GibbsTable& tbl, const BlockSpec& spec);
// Entries summed over subsets of currently monochromatic edges; |E| <= 20.
TransitionMatrix induced_sw(const GibbsTable& tbl, const SpinSystem& sys);

double stationarity_residual(const TransitionMatrix& tm);   // max |mu P - mu|
double reversibility_residual(const TransitionMatrix& tm);  // max |mu(x)P(xy)-mu(y)P(yx)|

// Absolute spectral gap via the sqrt(mu) similarity transform. Requires the
// detailed-balance residual below `reversibility_tol`.
double spectral_gap(const TransitionMatrix& tm, double reversibility_tol = 1e-9);

// All eigenvalues of the symmetrized kernel, ascending.
Eigen::VectorXd reversible_spectrum(const TransitionMatrix& tm, double reversibility_tol = 1e-9);

// Smallest t with max-over-starts TV distance <= eps.
long tv_mixing_time(const TransitionMatrix& tm, double eps, long max_steps = 1000000);

// Worst-start TV distance to stationarity after t steps.
double tv_distance_at(const TransitionMatrix& tm, long t);

// Ent_mu(f) with 0 log 0 = 0; f must be nonnegative.
double entropy(const std::vector<double>& f, const std::vector<double>& mu);

// relative entropy H(nu | mu)
double relative_entropy(const std::vector<double>& nu, const std::vector<double>& mu);

// Dirichlet form by the half-sum formula.
double dirichlet_form(const TransitionMatrix& tm, const std::vector<double>& f,
                      const std::vector<double>& g);

// <f, (I-P) g>_mu, the inner-product route (used as an identity cross-check).
double dirichlet_inner(const TransitionMatrix& tm, const std::vector<double>& f,
                       const std::vector<double>& g);

struct MlsiEstimate {
    double witness = 0.0;        // min over chased f of E(f, log f) / Ent(f)
    double bracket_lo = 0.0;     // (1 - 2 mu_min)/log(1/mu_min - 1) * gap
    double bracket_hi = 0.0;     // 2 * gap
    double gap = 0.0;
    double mu_min = 0.0;
    bool degenerate = false;     // mu_min >= 1/2: bracket returned directly
};

MlsiEstimate mlsi_estimate(const TransitionMatrix& tm, int trials, Rng& rng);

// H(nu P | mu) <= (1 - r) H(nu | mu)?
bool entropy_decay_check(const TransitionMatrix& tm, const std::vector<double>& nu, double r);

struct FactorizationReport {
    std::string scheme;
    double lhs = 0.0;
    double rhs = 0.0;            // unscaled sum of conditional entropies
    double ratio = 0.0;          // lhs / rhs
    bool ratio_defined = false;
    double reference_constant = 0.0;
    bool reference_flagged = false;  // unnamed universal constant reported as 1
    bool holds = true;               // lhs <= reference_constant * rhs + tol
};

// sum over pinnings tau of V \ block of mu(tau) * Ent of f on the slice
double expected_conditional_entropy(const GibbsTable& tbl, const std::vector<double>& f,
                                    const std::vector<int>& block);

FactorizationReport factorization_at(const GibbsTable& tbl, const std::vector<double>& f,
                                     double reference_constant);
FactorizationReport factorization_ubf(const GibbsTable& tbl, const std::vector<double>& f,
                                      int ell, double reference_constant);
FactorizationReport factorization_kpf(const GibbsTable& tbl, const std::vector<double>& f,
                                      const std::vector<std::vector<int>>& classes,
                                      double reference_constant);
FactorizationReport factorization_gbf(const GibbsTable& tbl, const std::vector<double>& f,
                                      const BlockSpec& spec, double reference_constant);

// Exact Edwards-Sokal joint table over (sigma, A) pairs with sigma ~ A.
struct JointTable {
    StateSpace spin_space;
    std::vector<uint32_t> spin_codes;
    std::vector<uint32_t> edge_masks;
    std::vector<double> probs;
    int size() const { return static_cast<int>(probs.size()); }
};

JointTable exact_edwards_sokal(const SpinSystem& sys, uint64_t cap = kDefaultStateCap);

FactorizationReport factorization_edge_spin(const JointTable& joint, const std::vector<double>& f,
                                            double reference_constant);

// Nested-subset additivity of conditional entropies: returns |lhs - rhs| for
// the telescoping identity over Lambda_1 subset ... subset Lambda_m, with f
// given on the full configuration cube.
double chain_rule_residual(const GibbsTable& tbl, const std::vector<double>& f_cube,
                           const std::vector<std::vector<int>>& nested, const Pinning& tau);

// K <=_mu L on nonnegative nondecreasing functions, decided over all pairs of
// up-set indicators of the product order on the support.
bool censoring_order_check(const TransitionMatrix& K, const TransitionMatrix& L,
                           const SpinOrder& order, size_t up_set_cap = 1u << 20,
                           int state_cap = 256);

}  // namespace spinsi
