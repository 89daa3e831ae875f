#pragma once

#include <atomic>
#include <algorithm>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace admercs {

// Runs fn(i) for every i in [0, n) on up to `threads` workers. Work items
// must be independent; deterministic output requires each item to write only
// to its own pre-sized slot. The first worker exception is rethrown.
inline void parallel_for(int64_t n, int32_t threads,
                         const std::function<void(int64_t)>& fn) {
    if (n <= 0) return;
    threads = static_cast<int32_t>(std::max<int64_t>(
        1, std::min<int64_t>(threads, n)));
    if (threads == 1) {
        for (int64_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int64_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const int64_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int32_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace admercs
