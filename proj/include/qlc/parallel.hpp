#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace qlc {

/// Calls body(begin, end) on contiguous chunks of [0, n). threads == 0 uses the
/// hardware concurrency. Chunk boundaries depend only on n and the thread count.
template <class Body>
void parallel_for(std::size_t n, unsigned threads, Body&& body) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
    if (threads <= 1) {
        body(std::size_t{0}, n);
        return;
    }
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    const std::size_t chunk = (n + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
        const std::size_t b = std::min(n, t * chunk);
        const std::size_t e = std::min(n, b + chunk);
        if (b < e) pool.emplace_back([&body, b, e] { body(b, e); });
    }
}

}  // namespace qlc
