#include "spinsi/poset.hpp"

#include <algorithm>
#include <stdexcept>

namespace spinsi {

Poset make_poset(int m, const std::function<bool(int, int)>& gt) {
    Poset p;
    p.m = m;
    // linear extension with maximal elements first: sort by number of dominators
    std::vector<std::vector<int>> above(m);
    for (int x = 0; x < m; ++x)
        for (int y = 0; y < m; ++y)
            if (x != y && gt(x, y)) above[y].push_back(x);
    p.topo.resize(m);
    for (int i = 0; i < m; ++i) p.topo[i] = i;
    std::stable_sort(p.topo.begin(), p.topo.end(), [&](int a, int b) {
        return above[a].size() < above[b].size();
    });
    p.greater = std::move(above);
    return p;
}

namespace {

struct UpSetDfs {
    const Poset& p;
    size_t cap;
    const std::function<bool(const std::vector<char>&)>& visit;
    std::vector<char> in;
    size_t count = 0;
    bool aborted = false;

    UpSetDfs(const Poset& p_, size_t cap_, const std::function<bool(const std::vector<char>&)>& v)
        : p(p_), cap(cap_), visit(v), in(p_.m, 0) {}

    bool run(size_t pos) {
        if (aborted) return false;
        if (pos == p.topo.size()) {
            if (++count > cap) {
                aborted = true;
                return false;
            }
            if (!visit(in)) {
                aborted = true;
                return false;
            }
            return true;
        }
        int e = p.topo[pos];
        // always allowed: leave e out
        in[e] = 0;
        if (!run(pos + 1)) return false;
        // e may be in only if everything above it is in
        bool allowed = true;
        for (int g : p.greater[e])
            if (!in[g]) {
                allowed = false;
                break;
            }
        if (allowed) {
            in[e] = 1;
            if (!run(pos + 1)) return false;
            in[e] = 0;
        }
        return true;
    }
};

}  // namespace

bool enumerate_up_sets(const Poset& p, size_t cap,
                       const std::function<bool(const std::vector<char>&)>& visit) {
    UpSetDfs dfs(p, cap, visit);
    dfs.run(0);
    return !dfs.aborted;
}

std::vector<std::vector<char>> all_up_sets(const Poset& p, size_t cap) {
    std::vector<std::vector<char>> out;
    bool ok = enumerate_up_sets(p, cap, [&](const std::vector<char>& in) {
        out.push_back(in);
        return true;
    });
    if (!ok) throw std::runtime_error("all_up_sets: enumeration cap exceeded");
    return out;
}

}  // namespace spinsi
