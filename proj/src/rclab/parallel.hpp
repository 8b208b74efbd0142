#pragma once

#include <cstddef>
#include <functional>

namespace rclab {

// Worker count used when a caller passes 0. Initialised from RC_LAB_THREADS,
// falling back to the hardware concurrency.
unsigned default_threads();
void set_default_threads(unsigned n);

// Runs body(i) for i in [0, count) on up to `threads` workers (0 = default).
// Each index is executed exactly once; the first exception is rethrown.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace rclab
