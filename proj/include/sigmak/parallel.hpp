#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace sigmak {

/// Process-wide cap on assembly workers; 0 means hardware concurrency.
inline std::atomic<int>& worker_setting() {
    static std::atomic<int> workers{0};
    return workers;
}

inline void set_workers(int workers) { worker_setting().store(workers < 0 ? 0 : workers); }

inline int effective_workers() {
    const int w = worker_setting().load();
    if (w > 0) return w;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs fn(begin, end) over contiguous chunks of [0, count). Chunks write
/// disjoint outputs, so results do not depend on the worker count.
template <class Fn>
void parallel_for(std::size_t count, Fn&& fn) {
    const std::size_t workers =
        std::min<std::size_t>(static_cast<std::size_t>(effective_workers()), std::max<std::size_t>(count / 1024, 1));
    if (workers <= 1) {
        fn(std::size_t{0}, count);
        return;
    }
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    const std::size_t chunk = (count + workers - 1) / workers;
    for (std::size_t w = 1; w < workers; ++w) {
        const std::size_t b = std::min(count, w * chunk);
        const std::size_t e = std::min(count, b + chunk);
        pool.emplace_back([&fn, b, e] { fn(b, e); });
    }
    fn(std::size_t{0}, std::min(count, chunk));
}

}  // namespace sigmak
