#pragma once

#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace dualobs {

// Worker count from DUALOBS_WORKERS, else hardware concurrency (at least 1).
std::size_t default_workers();

// Runs fn(task) for task in [0, tasks), striding tasks across `workers`
// threads. The first exception thrown by any task is rethrown. Callers write
// results into per-task slots, so the outcome does not depend on scheduling.
template <typename Fn>
void parallel_for(std::size_t tasks, std::size_t workers, Fn&& fn)
{
    if (workers <= 1 || tasks <= 1) {
        for (std::size_t t = 0; t < tasks; ++t) fn(t);
        return;
    }
    if (workers > tasks) workers = tasks;
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t t = w; t < tasks; t += workers) fn(t);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace dualobs
