// parallel.hpp — deterministic fork-join map over an index range
#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

#include "ndsthermo/errors.hpp"

namespace ndsthermo {

// Evaluates fn(0..count-1) with up to `workers` threads and returns results
// in index order.  Jobs must be independent; the reduction order is fixed by
// the index, so outputs are identical for every worker count.
template <class T, class Fn>
std::vector<T> parallel_map(std::size_t count, int workers, Fn&& fn) {
    std::vector<T> out(count);
    if (count == 0) return out;
    if (workers < 1) throw ParameterError("parallel_map: worker count must be >= 1");
    const std::size_t threads = std::min<std::size_t>(static_cast<std::size_t>(workers), count);

    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
        return out;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    auto worker = [&] {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= count || failed.load()) return;
            try {
                out[i] = fn(i);
            } catch (...) {
                if (!failed.exchange(true)) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (failed.load() && error) std::rethrow_exception(error);
    return out;
}

}  // namespace ndsthermo
