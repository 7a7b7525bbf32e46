#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

namespace lexcourt {

/// Selects between the serial reference path and the OpenMP kernel of an
/// operation. Both paths must produce identical results.
enum class Execution { serial, parallel };

/// Calls body(i) for i in [0, n). The parallel path uses an OpenMP dynamic
/// schedule; the first exception thrown by any iteration is rethrown after
/// the loop. Callers write results into pre-sized slots indexed by i, so the
/// outcome does not depend on the schedule.
template <typename Body>
void for_each_index(std::ptrdiff_t n, Execution execution, Body&& body) {
    if (execution == Execution::serial) {
        for (std::ptrdiff_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::exception_ptr failure;
    std::mutex failure_mutex;
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            body(i);
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
}

}  // namespace lexcourt
