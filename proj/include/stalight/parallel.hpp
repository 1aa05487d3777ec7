#ifndef STALIGHT_PARALLEL_HPP
#define STALIGHT_PARALLEL_HPP

#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace stalight {

// Worker-pool cap: explicit argument, else STALIGHT_THREADS, else hardware.
inline int effective_threads(int requested = 0) {
    int n = requested;
    if (n <= 0) {
        if (const char* env = std::getenv("STALIGHT_THREADS")) {
            n = std::atoi(env);
        }
    }
    if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
    if (n <= 0) n = 1;
    return n;
}

// Run fn(i) for i in [0, n) on a bounded pool. Work items are claimed from a
// shared counter; callers index results by i, so output order is
// deterministic regardless of scheduling.
inline void parallel_for(int n, const std::function<void(int)>& fn, int max_threads = 0) {
    const int workers = std::min(effective_threads(max_threads), n);
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            int i;
            while ((i = next.fetch_add(1)) < n) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace stalight

#endif
