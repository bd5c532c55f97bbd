#pragma once

#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace sparsecert {

// Default worker count: SPARSECERT_JOBS env var if set, hardware concurrency
// otherwise. Flags override at the call sites.
inline int default_jobs() {
    if (const char* env = std::getenv("SPARSECERT_JOBS")) {
        int v = std::atoi(env);
        if (v >= 1) return v;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

// Static striping of [0, count) across workers. Work items must be
// independent; results keyed by index stay deterministic at any job count.
template <typename Fn>
void parallel_for(std::size_t count, int jobs, Fn&& fn) {
    if (jobs < 1) jobs = 1;
    if (jobs == 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> workers;
    std::exception_ptr error;
    std::mutex error_mu;
    auto run = [&](std::size_t start) {
        try {
            for (std::size_t i = start; i < count; i += static_cast<std::size_t>(jobs)) fn(i);
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mu);
            if (!error) error = std::current_exception();
        }
    };
    workers.reserve(static_cast<std::size_t>(jobs));
    for (int w = 0; w < jobs; ++w) workers.emplace_back(run, static_cast<std::size_t>(w));
    for (auto& t : workers) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace sparsecert
