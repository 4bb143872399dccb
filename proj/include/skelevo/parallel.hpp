#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace skelevo {

/// Runs body(i) for i in [0, count) on up to `jobs` threads. Each index is
/// processed exactly once; results must be written to per-index slots so the
/// outcome does not depend on scheduling. The exception thrown at the lowest
/// index is rethrown.
template <typename Body>
void parallel_for(std::size_t count, int jobs, Body&& body) {
    const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(jobs, 1)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::size_t failure_index = count;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (i < failure_index) {
                    failure_index = i;
                    failure = std::current_exception();
                }
            }
        }
    };

    std::vector<std::jthread> threads;
    threads.reserve(workers - 1);
    for (std::size_t t = 1; t < workers; ++t) threads.emplace_back(worker);
    worker();
    threads.clear();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace skelevo
