#pragma once

#include <atomic>
#include <thread>
#include <vector>

namespace spinsi {

// Runs fn(i) for i in [0, count). Tasks must be independent; results keyed by
// task index so any thread count yields identical output.
template <class F>
void parallel_for(long count, int threads, F&& fn) {
    if (threads <= 1 || count <= 1) {
        for (long i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<long> next{0};
    auto worker = [&] {
        for (;;) {
            long i = next.fetch_add(1);
            if (i >= count) return;
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    int spawn = std::min<long>(threads, count);
    pool.reserve(spawn);
    for (int t = 0; t < spawn; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

}  // namespace spinsi
