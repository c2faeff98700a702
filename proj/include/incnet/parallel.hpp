#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace incnet {

// Runs fn(0..count-1) on up to `workers` threads. Tasks must be independent
// and write only to their own result slots, so the outcome does not depend
// on scheduling. The first exception thrown by a task is rethrown in the
// caller after all threads drain.
inline void run_parallel(int count, int workers, const std::function<void(int)>& fn) {
    if (workers <= 1 || count <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const int idx = next.fetch_add(1);
            if (idx >= count) return;
            try {
                fn(idx);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    const int k = std::min(workers, count);
    pool.reserve(k);
    for (int i = 0; i < k; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

int default_worker_count();

}  // namespace incnet
