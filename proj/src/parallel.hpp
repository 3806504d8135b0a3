#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace sublinear::detail {

/// Runs work(chunk) for chunk in [0, chunks) on up to `threads` threads.
/// Results must be written to per-chunk slots; callers reduce them in chunk
/// order, so output does not depend on scheduling.
template <typename Work>
void for_each_chunk(std::size_t chunks, unsigned threads, Work&& work) {
    const std::size_t workers = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(chunks, 1));
    if (workers == 1) {
        for (std::size_t c = 0; c < chunks; ++c) work(c);
        return;
    }
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t c = w; c < chunks; c += workers) work(c);
        });
    }
}

}  // namespace sublinear::detail
