#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <unordered_map>
#include <vector>

#include "spinsi/spin.hpp"

namespace spinsi {

// Mixed-radix codec for full configurations: code = sum_v sigma_v * q^v.
struct StateSpace {
    int n = 0;
    int q = 2;
    std::vector<uint32_t> pow;

    StateSpace() = default;
    StateSpace(int n_, int q_);
    uint64_t size() const;
    uint32_t encode(const std::vector<uint8_t>& sigma) const;
    std::vector<uint8_t> decode(uint32_t code) const;
    int spin_of(uint32_t code, int v) const { return static_cast<int>(code / pow[v]) % q; }
    uint32_t with_spin(uint32_t code, int v, int s) const {
        return code + static_cast<uint32_t>(s - spin_of(code, v)) * pow[v];
    }
};

// Exact Gibbs distribution on the support (zero-weight configurations excluded).
struct GibbsTable {
    StateSpace space;
    std::vector<uint32_t> states;  // ascending code order
    std::vector<double> probs;
    double log_z = 0.0;

    int size() const { return static_cast<int>(states.size()); }
    int row_of(uint32_t code) const;  // -1 if not in support
    double prob_of(uint32_t code) const;
    bool in_support(uint32_t code) const { return row_of(code) >= 0; }

    void build_index();

  private:
    std::unordered_map<uint32_t, int> index_;
};

constexpr uint64_t kDefaultStateCap = 1u << 20;

// Full enumeration; errors when q^n exceeds the cap.
GibbsTable exact_gibbs(const SpinSystem& sys, uint64_t cap_states = kDefaultStateCap);

// Exact projection onto `verts`: partial configuration (spins aligned with
// verts) -> probability.
std::map<std::vector<int>, double> marginal(const GibbsTable& tbl, const std::vector<int>& verts);

// Conditional given a pinning, renormalized on the same code space.
// Throws when the conditional support is empty.
GibbsTable condition_table(const GibbsTable& tbl, const Pinning& tau);

// p[v][s] = mu(sigma_v = s) for every vertex under the table's distribution.
std::vector<std::vector<double>> single_marginals(const GibbsTable& tbl);

// Consistent vertex-spin pairs of a (conditional) table: unpinned vertices
// and spins with positive marginal.
struct VertexSpin {
    int v;
    int s;
};
std::vector<VertexSpin> consistent_pairs(const GibbsTable& tbl, const Pinning& tau);

// Visit every pinned subset Lambda (|Lambda| <= max_pinned, at least
// min_free vertices left free) and every consistent pinning tau on it,
// including the empty pinning.
void for_each_pinning(const GibbsTable& full, int max_pinned, int min_free,
                      const std::function<void(const Pinning&)>& visit);

struct MarginalBound {
    double b = 1.0;
    Pinning witness_pinning;
    int witness_vertex = -1;
    int witness_spin = -1;
};

// Tight b of the bounded-marginals condition, with an attaining pinning.
MarginalBound marginal_lower_bound(const SpinSystem& sys, uint64_t cap_states = kDefaultStateCap);

// True iff every conditional support is connected under single-site spin flips.
bool is_totally_connected(const SpinSystem& sys, uint64_t cap_states = kDefaultStateCap);

// Exact monotonicity test (Definition of a monotone system): stochastic
// dominance of conditionals for every comparable pinning pair, decided by
// enumerating all up-sets of the product order on the conditional supports.
// up_set_cap bounds the enumeration per comparison.
bool is_monotone(const SpinSystem& sys, const SpinOrder& order,
                 uint64_t cap_states = kDefaultStateCap, size_t up_set_cap = 1u << 20);

// Single-site sufficient criterion used as the precondition for monotone
// couplings on systems too large for exact enumeration: every heat-bath
// conditional is stochastically monotone in its neighborhood configuration.
bool is_heat_bath_monotone(const SpinSystem& sys, const SpinOrder& order);

}  // namespace spinsi
