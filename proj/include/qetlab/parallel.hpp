#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace qet {

/// Worker count from QETLAB_THREADS, else the hardware concurrency.
int default_threads();

/// Runs body(i) for i in [0, n) on up to `threads` workers. Each index is
/// handled exactly once; results must be written to per-index slots so the
/// outcome does not depend on scheduling. The first exception is rethrown.
void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t)> &body);

} // namespace qet
