#pragma once

#include <cstddef>
#include <functional>

namespace atslab {

// Resolve a thread count: requested > 0 wins, else ATSLAB_THREADS, else
// hardware concurrency (min 1).
int resolve_threads(int requested);

// Run body(i) for i in [0, n) on `threads` workers. Results must be written
// to index-addressed slots so output order is deterministic.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

}  // namespace atslab
