#pragma once

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace hlt {

// Runs fn(i) for i in [0, n). Work items must be independent; results must
// not depend on the partitioning, so any thread count yields identical output.
inline void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
    if (threads <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    int workers = std::min(threads, n);
    std::atomic<int> next{0};
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) {
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace hlt
