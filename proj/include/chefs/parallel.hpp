#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace chefs {

/// Runs fn(i) for i in [0, n) on up to `jobs` threads. Work is handed out by an
/// atomic counter. If several tasks throw, the exception of the lowest index is
/// rethrown so error reporting does not depend on scheduling.
template <typename Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn&& fn) {
    if (n == 0) return;
    const std::size_t workers = std::min<std::size_t>(std::max(1u, jobs), n);
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) {
                    try {
                        fn(i);
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                }
            });
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

/// Splits [0, n) into contiguous chunks, folds each into its own State on up to
/// `jobs` threads and merges the partial states in chunk order. With associative
/// merges the result is independent of `jobs`.
template <typename State, typename Fold, typename Merge>
State parallel_fold(std::size_t n, unsigned jobs, Fold&& fold, Merge&& merge) {
    const std::size_t chunks = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(1, n));
    std::vector<State> partial(chunks);
    parallel_for(chunks, jobs, [&](std::size_t c) {
        const std::size_t begin = n * c / chunks;
        const std::size_t end = n * (c + 1) / chunks;
        for (std::size_t i = begin; i < end; ++i) fold(partial[c], i);
    });
    State out = std::move(partial[0]);
    for (std::size_t c = 1; c < chunks; ++c) merge(out, std::move(partial[c]));
    return out;
}

}  // namespace chefs
