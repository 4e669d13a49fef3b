#pragma once

#include <cstddef>
#include <exception>
#include <mutex>
#include <vector>

#ifdef KPZ_HAVE_OPENMP
#include <omp.h>
#endif

namespace kpz {

enum class Execution { Serial, Parallel };

inline int worker_count() noexcept {
#ifdef KPZ_HAVE_OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

// Calls fn(i) for i in [0, count). Results must be written by index, which keeps
// aggregation order independent of scheduling. The first exception thrown by any
// iteration is rethrown after the loop.
template <class Fn>
void for_each_index(std::size_t count, Fn&& fn, Execution mode = Execution::Parallel) {
    if (mode == Execution::Serial || count < 2) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::exception_ptr first;
    std::mutex guard;
#ifdef KPZ_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(count); ++i) {
        try {
            fn(static_cast<std::size_t>(i));
        } catch (...) {
            std::lock_guard lock(guard);
            if (!first) first = std::current_exception();
        }
    }
    if (first) std::rethrow_exception(first);
}

template <class T, class Fn>
std::vector<T> map_replicas(std::size_t count, Fn&& fn, Execution mode = Execution::Parallel) {
    std::vector<T> out(count);
    for_each_index(count, [&](std::size_t i) { out[i] = fn(i); }, mode);
    return out;
}

}  // namespace kpz
