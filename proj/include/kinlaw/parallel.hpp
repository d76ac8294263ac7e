#pragma once

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace kinlaw {

// Thread cap from KINLAW_THREADS (default: hardware concurrency).
inline int thread_cap() {
    if (const char* env = std::getenv("KINLAW_THREADS")) {
        int n = std::atoi(env);
        if (n >= 1) return n;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

// Static block partition; each index is handled exactly once, so results are
// bit-identical for any thread count as long as workers write disjoint slots.
inline void parallel_for(int n, const std::function<void(int)>& body) {
    const int nthreads = std::min(thread_cap(), std::max(1, n));
    if (nthreads == 1 || n <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    const int chunk = (n + nthreads - 1) / nthreads;
    for (int t = 0; t < nthreads; ++t) {
        const int lo = t * chunk;
        const int hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &body] {
            for (int i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace kinlaw
