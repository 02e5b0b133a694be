#ifndef GHOSTUMAP_PARALLEL_HPP
#define GHOSTUMAP_PARALLEL_HPP

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace ghostumap {

/**
 * Split [0, n) into `threads` contiguous chunks and call `fun(start, end)` on each.
 * With one thread (or little work) the call happens inline on the calling thread.
 */
template<class Function>
void parallel_for(std::size_t n, int threads, Function fun) {
    const std::size_t workers = std::min<std::size_t>(std::max(threads, 1), n);
    if (workers <= 1) {
        fun(std::size_t(0), n);
        return;
    }

    const std::size_t chunk = (n + workers - 1) / workers;
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        std::size_t start = w * chunk, end = std::min(n, start + chunk);
        if (start >= end) {
            break;
        }
        pool.emplace_back([&fun, start, end]() { fun(start, end); });
    }
}

/// Same as `parallel_for()` but also passes the worker index: `fun(worker, start, end)`.
template<class Function>
void parallel_for_workers(std::size_t n, int threads, Function fun) {
    const std::size_t workers = std::min<std::size_t>(std::max(threads, 1), n);
    if (workers <= 1) {
        fun(std::size_t(0), std::size_t(0), n);
        return;
    }

    const std::size_t chunk = (n + workers - 1) / workers;
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        std::size_t start = w * chunk, end = std::min(n, start + chunk);
        if (start >= end) {
            break;
        }
        pool.emplace_back([&fun, w, start, end]() { fun(w, start, end); });
    }
}

}

#endif
