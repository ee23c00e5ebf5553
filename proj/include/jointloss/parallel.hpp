#pragma once

#include <cstddef>
#include <functional>

namespace jointloss {

/// Number of worker threads used by grid evaluation and sampling.
/// Defaults to the hardware concurrency; results never depend on it.
int worker_count();
void set_worker_count(int workers);

/// Runs body(begin, end) over a static partition of [0, n) into contiguous
/// blocks, one per worker. Exceptions are rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace jointloss
