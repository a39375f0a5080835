#pragma once

#include <cstddef>
#include <functional>

namespace collapse {

/// COLLAPSE_LATTICE_THREADS if set to a positive integer, else the hardware
/// concurrency (at least 1).
int worker_count();

/// Runs body(i) for i in [0, count) on up to `workers` threads (0 selects
/// worker_count()). Each index runs exactly once; the first exception thrown
/// by any body is rethrown after all workers stop.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body,
                  int workers = 0);

}  // namespace collapse
