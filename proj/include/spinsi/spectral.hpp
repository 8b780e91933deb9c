#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "spinsi/gibbs.hpp"

namespace spinsi {

// Signed pairwise influence matrix over consistent vertex-spin pairs.
struct InfluenceMatrix {
    std::vector<VertexSpin> index;
    Eigen::MatrixXd psi;
    Pinning pinning;
};

InfluenceMatrix influence_matrix(const GibbsTable& full, const Pinning& tau);

// Largest real eigenvalue part; asserts the imaginary part is < 1e-8.
double top_eigenvalue(const Eigen::MatrixXd& m);

struct EtaResult {
    double eta = 0.0;
    Pinning witness;
    long pinnings_checked = 0;
};

// Max over all pinned subsets (|Lambda| <= max_pinned, at least 2 free
// vertices) and consistent pinnings of the top influence eigenvalue.
EtaResult eta(const SpinSystem& sys, int max_pinned = -1,
              uint64_t cap_states = kDefaultStateCap);

struct DobrushinMatrix {
    Eigen::MatrixXd entries;  // n x n, zero diagonal
};

// Worst-case single-site total-variation influences, maximized over all
// pairs of full pinnings of V \ {v} disagreeing only at u.
DobrushinMatrix dobrushin_matrix(const SpinSystem& sys, uint64_t cap_states = kDefaultStateCap);

double spectral_norm(const Eigen::MatrixXd& m);   // top singular value
double max_row_sum(const Eigen::MatrixXd& m);

// Vertex-spin-pair walk whose second eigenvalue rescales the top influence
// eigenvalue: lambda_1(Psi^tau) = (free - 1) * lambda_2(P_hat).
struct LocalWalk {
    std::vector<VertexSpin> index;
    Eigen::MatrixXd P;
    Eigen::VectorXd pi;
    int free_count = 0;  // n - k
};

LocalWalk local_random_walk(const GibbsTable& full, const Pinning& tau);

double walk_reversibility_residual(const LocalWalk& walk);
// second-largest eigenvalue (signed), via the sqrt(pi) similarity transform
double walk_lambda2(const LocalWalk& walk);

// Bottleneck ratio min over nonempty S with pi(S) <= 1/2 of Q(S, S^c)/pi(S).
// Exact cut enumeration; the index must hold at most `max_pairs` pairs.
double conductance(const LocalWalk& walk, int max_pairs = 20);

// Approximate mode for larger indices: min over sampled cuts, an upper bound
// on the exact bottleneck ratio.
double conductance_sampled(const LocalWalk& walk, int samples, Rng& rng);

// Closed-form reference bounds evaluated from model quantities.
struct ReferenceBounds {
    double glauber_gap_lower = 0.0;  // (2 b^4 / ((ceil(2 eta)+2)^4 n))^(1+ceil(2 eta))
    double c_ubf = 0.0;              // (e/theta)^(ceil(2 eta / b))
    double c_kpf_logn = 0.0;         // ((eta+1)^5 Delta ln n / b^6)^kappa, C := 1 (flagged)
    double c_kpf_delta = 0.0;        // ((eta+1)^5 Delta^4 / b^6)^kappa, C := 1 (flagged)
    double kappa = 0.0;              // 2 + ceil(2 eta / b)
    bool kpf_flagged = true;         // reference only, unnamed constant set to 1
};

ReferenceBounds reference_bounds(double eta, double b, int max_degree, int n, double theta);

double bound_glauber_gap(double eta, double b, int n);
double bound_c_ubf(double theta, double eta, double b);
double bound_kpf_from_gap(double gamma, double b, int n);  // 3 n log(1/b) / gamma
double bound_si_from_coupling(double D, double M, double kappa);  // 2 D M / (1 - kappa)

}  // namespace spinsi
