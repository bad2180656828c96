#pragma once

#include <cstddef>
#include <functional>

namespace recdep {

/// Worker count: RECDEP_THREADS if set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
unsigned worker_count();

/// Calls fn(i) for every i in [0, n). Indices are split into contiguous
/// chunks; fn must only write to per-index state so the result does not
/// depend on the number of workers.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, unsigned workers = 0);

}  // namespace recdep
