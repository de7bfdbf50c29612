#pragma once

#include <cstddef>
#include <functional>

namespace packscope {

/// Worker count: hardware concurrency, capped by the PACKSCOPE_THREADS env var when set.
[[nodiscard]] std::size_t worker_count();

/// Runs `body(i)` for i in [0, n) on up to worker_count() threads. Items are
/// claimed dynamically; callers write results by index so output order is fixed.
/// The first exception thrown by any body is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace packscope
