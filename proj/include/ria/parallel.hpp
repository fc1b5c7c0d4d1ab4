// Deterministic chunked parallelism: chunk boundaries are fixed by the work
// size alone, so per-chunk results (and any reduction over them in chunk
// order) are bit-identical for every thread count.
#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace ria {

inline void parallel_chunks(
    unsigned long long total, unsigned long long chunk_size, int threads,
    const std::function<void(std::size_t chunk_index, unsigned long long begin,
                             unsigned long long end)>& fn) {
    if (total == 0) return;
    if (chunk_size == 0) chunk_size = 1;
    const std::size_t num_chunks =
        static_cast<std::size_t>((total + chunk_size - 1) / chunk_size);
    if (threads <= 1 || num_chunks == 1) {
        for (std::size_t c = 0; c < num_chunks; ++c) {
            unsigned long long b = c * chunk_size;
            unsigned long long e = std::min(total, b + chunk_size);
            fn(c, b, e);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t c = next.fetch_add(1);
            if (c >= num_chunks) return;
            unsigned long long b = c * chunk_size;
            unsigned long long e = std::min(total, b + chunk_size);
            fn(c, b, e);
        }
    };
    std::vector<std::thread> pool;
    int nthreads = std::min<int>(threads, static_cast<int>(num_chunks));
    pool.reserve(nthreads);
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
}

}  // namespace ria
