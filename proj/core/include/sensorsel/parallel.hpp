#ifndef SENSORSEL_PARALLEL_HPP
#define SENSORSEL_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace sensorsel {

/// Worker count: `SENTRY_THREADS` when set to a positive integer, otherwise
/// the hardware concurrency (at least 1).
std::size_t worker_count();

/// Calls `body(i)` for every i in [0, count). Work is split into contiguous
/// chunks; results must be written to per-index slots so the outcome does not
/// depend on scheduling. The first exception thrown by any worker is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace sensorsel

#endif  // SENSORSEL_PARALLEL_HPP
