#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace spinsi {

// Finite poset given by strict dominator lists: greater[x] holds the elements
// strictly above x, restricted to positions earlier in processing order.
struct Poset {
    int m = 0;
    std::vector<int> topo;                    // linear extension, maximal first
    std::vector<std::vector<int>> greater;    // strict dominators of each element
};

// Build from a strict dominance predicate gt(x, y) meaning x > y.
Poset make_poset(int m, const std::function<bool(int, int)>& gt);

// Enumerate every up-closed subset (including the empty and full sets).
// `visit` receives a membership vector and may return false to abort early.
// Returns false when the cap was hit or visit aborted before completion.
bool enumerate_up_sets(const Poset& p, size_t cap,
                       const std::function<bool(const std::vector<char>&)>& visit);

// Convenience: materialize all up-sets (throws if cap exceeded).
std::vector<std::vector<char>> all_up_sets(const Poset& p, size_t cap);

}  // namespace spinsi
