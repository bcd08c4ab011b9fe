#pragma once

#include <cstddef>
#include <functional>

namespace reflex {

// Worker count: COLLISION_REFLEX_THREADS when set (0 = auto), otherwise the
// hardware concurrency.
int configured_threads();

// Runs fn(i) for every i in [0, n) across the configured workers. Each index
// must write only its own output slot; the first exception thrown by any
// worker is rethrown on the caller.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace reflex
