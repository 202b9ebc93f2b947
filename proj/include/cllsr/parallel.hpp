#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace cllsr {

/// Worker count from CLLSR_THREADS, falling back to hardware concurrency.
inline int default_thread_count()
{
    if (const char* env = std::getenv("CLLSR_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/*
 * Runs fn(i) for i in [0, count) over contiguous chunks. Callers write to
 * disjoint locations, so results do not depend on the thread count.
 * The first exception thrown by any worker is rethrown after the join.
 */
template <class Fn>
void parallel_for(long count, int threads, Fn&& fn)
{
    threads = std::max(1, std::min<int>(threads, static_cast<int>(std::max(1L, count))));
    if (threads == 1) {
        for (long i = 0; i < count; ++i) fn(i);
        return;
    }
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    const long chunk = (count + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        const long lo = t * chunk;
        const long hi = std::min(count, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, lo, hi] {
            try {
                for (long i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

} // namespace cllsr
