#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

namespace qmean {

/// Default worker count: QMEAN_PARALLELISM when set to a positive integer, else 1.
inline int default_parallelism() {
    if (const char* env = std::getenv("QMEAN_PARALLELISM")) {
        try {
            const int v = std::stoi(env);
            if (v > 0) return v;
        } catch (const std::exception&) {
        }
    }
    return 1;
}

/// Evaluates f(0..count-1) on up to `parallelism` threads. Results are stored by index,
/// so the output never depends on scheduling.
template <class F>
auto parallel_map(std::size_t count, int parallelism, F&& f) -> std::vector<std::invoke_result_t<F&, std::size_t>> {
    using R = std::invoke_result_t<F&, std::size_t>;
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(parallelism, 1)), count);
    if (workers <= 1) {
        std::vector<R> out;
        out.reserve(count);
        for (std::size_t i = 0; i < count; ++i) out.push_back(f(i));
        return out;
    }
    std::vector<std::optional<R>> slots(count);
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t t = 0; t < workers; ++t) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < count; i = next++) {
                    try {
                        slots[i].emplace(f(i));
                    } catch (...) {
                        std::lock_guard lock(error_mutex);
                        if (!error) error = std::current_exception();
                    }
                }
            });
        }
    }
    if (error) std::rethrow_exception(error);
    std::vector<R> out;
    out.reserve(count);
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

}  // namespace qmean
