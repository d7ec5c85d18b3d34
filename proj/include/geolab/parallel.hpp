#pragma once

#include <cstddef>
#include <functional>

namespace geolab {

// Worker count: the GEOLAB_THREADS environment variable when set to a
// positive integer, otherwise the hardware concurrency.
int thread_count();

// Runs body(0) ... body(n-1), possibly concurrently.  Iterations must not
// depend on each other; the first exception thrown is rethrown to the
// caller.  Results should be written into per-index slots so the outcome is
// independent of scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace geolab
