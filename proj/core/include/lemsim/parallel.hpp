#pragma once

#include <cstddef>
#include <functional>

namespace lemsim {

/// Calls fn(i) for i in [0, count) on up to `threads` workers. Callers write
/// into pre-sized slots so output order never depends on scheduling. The
/// first exception thrown by any call is rethrown after all workers join.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn);

/// LEMSIM_THREADS when set to a positive integer, otherwise the hardware
/// concurrency (at least 1).
unsigned threads_from_env();

}  // namespace lemsim
