#pragma once

#include <cstddef>
#include <functional>

namespace resonant {

/// Worker cap: RESONANT_THREADS when set to a positive integer, otherwise
/// the number of logical cores.
int worker_count();

/// Runs fn(0) .. fn(n-1) on up to `workers` threads. Indices are handed out
/// dynamically, so fn must not depend on execution order. The first
/// exception thrown by any call is rethrown after all workers finish.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

}  // namespace resonant
