#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace klnmf {

/// Run fn(begin, end) over contiguous chunks of [0, n) on `threads` workers.
/// Chunks are disjoint, so kernels that write one output column per index are
/// race-free and produce the same bits for any worker count.
template <class Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn&& fn) {
    if (n == 0) return;
    if (threads <= 1 || n == 1) {
        fn(std::size_t{0}, n);
        return;
    }
    const std::size_t workers = threads < n ? threads : n;
    const std::size_t chunk = (n + workers - 1) / workers;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        if (begin >= n) break;
        const std::size_t end = begin + chunk < n ? begin + chunk : n;
        pool.emplace_back([&fn, begin, end] { fn(begin, end); });
    }
    for (auto& t : pool) t.join();
}

} // namespace klnmf
