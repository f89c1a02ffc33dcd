#pragma once

#include <cstddef>
#include <functional>

namespace e2f {

// Worker cap: E2F_THREADS when set, else hardware_concurrency, clamped to [1, 16].
int max_threads();

// Splits [0, n) into contiguous ranges and runs fn(begin, end) on worker
// threads. Callers must write disjoint outputs per index; results are then
// bit-identical for any thread count. Work smaller than `grain` runs inline.
void parallel_for(std::size_t n, std::size_t grain,
                  const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace e2f
