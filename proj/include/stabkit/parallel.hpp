#pragma once

#include <cstddef>
#include <exception>
#include <vector>

namespace stabkit {

enum class Exec { Serial, Parallel };

/// Calls body(i) for i < n, across OpenMP threads when exec is Parallel.
/// Exceptions cannot leave an OpenMP region; the one thrown for the lowest
/// index is rethrown after the loop.
template <class Body>
void run_indexed(std::size_t n, Exec exec, Body body) {
    std::vector<std::exception_ptr> errors(n);
    auto guarded = [&](std::size_t i) {
        try {
            body(i);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    };
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
        for (std::size_t i = 0; i < n; ++i) guarded(i);
    } else {
        for (std::size_t i = 0; i < n; ++i) guarded(i);
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace stabkit
