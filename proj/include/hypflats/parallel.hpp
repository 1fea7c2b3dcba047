#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

namespace hypflats {

// Worker count: explicit request, then HYPFLATS_THREADS, then hardware.
inline int resolve_thread_count(int requested = 0) {
    if (requested > 0)
        return requested;
    if (const char* env = std::getenv("HYPFLATS_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0)
            return v;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

// Evaluate fn(0..n-1) across a thread pool, collecting results in index
// order.  Work items are handed out through an atomic counter; because every
// result lands in its own slot, the output does not depend on the thread
// count or scheduling.
template <class T, class Fn>
std::vector<T> parallel_map(long n, int threads, const Fn& fn) {
    if (n < 0)
        throw std::invalid_argument("parallel_map: negative count");
    std::vector<T> out(static_cast<std::size_t>(n));
    if (n == 0)
        return out;
    threads = std::max(1, std::min<long>(threads, n) > 0
                              ? static_cast<int>(std::min<long>(threads, n))
                              : 1);
    if (threads == 1) {
        for (long k = 0; k < n; ++k)
            out[static_cast<std::size_t>(k)] = fn(k);
        return out;
    }
    std::atomic<long> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&]() {
        for (;;) {
            const long k = next.fetch_add(1);
            if (k >= n)
                return;
            try {
                out[static_cast<std::size_t>(k)] = fn(k);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error)
                    first_error = std::current_exception();
                next.store(n);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int k = 0; k < threads; ++k)
        pool.emplace_back(worker);
    for (auto& th : pool)
        th.join();
    if (first_error)
        std::rethrow_exception(first_error);
    return out;
}

} // namespace hypflats
