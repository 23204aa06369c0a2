#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace crossworld {

inline int resolve_jobs(int jobs) {
    if (jobs > 0) {
        return jobs;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs fn(block_index) for block_index in [0, n_blocks) on up to `jobs`
// threads, handing out blocks through an atomic counter. Numerical results
// must be written into per-block slots by the callback; because every block is
// computed independently of scheduling, the combined result is identical for
// any thread count. If callbacks throw, the exception from the lowest block
// index is rethrown (again scheduling-invariant).
template <typename Fn>
void parallel_for_blocks(std::uint64_t n_blocks, int jobs, Fn&& fn) {
    const int n_threads = static_cast<int>(
        std::min<std::uint64_t>(static_cast<std::uint64_t>(resolve_jobs(jobs)),
                                n_blocks == 0 ? 1 : n_blocks));
    if (n_threads <= 1) {
        for (std::uint64_t b = 0; b < n_blocks; ++b) {
            fn(b);
        }
        return;
    }

    std::atomic<std::uint64_t> next{0};
    std::mutex err_mutex;
    std::uint64_t err_block = n_blocks;
    std::exception_ptr err;

    auto worker = [&]() {
        for (;;) {
            const std::uint64_t b = next.fetch_add(1, std::memory_order_relaxed);
            if (b >= n_blocks) {
                return;
            }
            try {
                fn(b);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (b < err_block) {
                    err_block = b;
                    err = std::current_exception();
                }
            }
        }
    };

    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) {
        threads.emplace_back(worker);
    }
    for (auto& t : threads) {
        t.join();
    }
    if (err) {
        std::rethrow_exception(err);
    }
}

} // namespace crossworld
