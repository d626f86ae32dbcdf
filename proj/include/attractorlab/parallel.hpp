#pragma once

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace attractorlab {

// Worker cap: ATTRACTORLAB_THREADS when set, hardware concurrency otherwise.
inline int thread_budget() {
    if (const char* env = std::getenv("ATTRACTORLAB_THREADS")) {
        int v = std::atoi(env);
        if (v >= 1) return v;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Splits [0, count) into a fixed number of chunks and runs body(chunk, begin,
// end) across at most thread_budget() workers. The chunk decomposition does
// not depend on the worker count, so per-chunk results merged in chunk order
// give deterministic reductions.
template <class Body>
void run_chunked(std::size_t count, std::size_t chunks, Body&& body) {
    if (count == 0) return;
    chunks = std::max<std::size_t>(1, std::min(chunks, count));
    int workers = std::min<int>(thread_budget(), static_cast<int>(chunks));
    auto chunk_range = [&](std::size_t c) {
        std::size_t lo = count * c / chunks;
        std::size_t hi = count * (c + 1) / chunks;
        return std::pair<std::size_t, std::size_t>(lo, hi);
    };
    if (workers <= 1) {
        for (std::size_t c = 0; c < chunks; ++c) {
            auto [lo, hi] = chunk_range(c);
            body(c, lo, hi);
        }
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t c = static_cast<std::size_t>(w); c < chunks;
                 c += static_cast<std::size_t>(workers)) {
                auto [lo, hi] = chunk_range(c);
                body(c, lo, hi);
            }
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace attractorlab
