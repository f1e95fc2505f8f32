#pragma once

#include <cstddef>
#include <functional>

namespace mmdim {

/// Worker count: `requested` when positive, else hardware concurrency; both
/// capped by MMDIM_THREADS when that is set to a positive integer.
unsigned thread_count(unsigned requested = 0);

/// Runs fn(i) for i in [0, count) on up to `threads` workers. Each index runs
/// exactly once; the first exception thrown is rethrown after all workers join.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace mmdim
