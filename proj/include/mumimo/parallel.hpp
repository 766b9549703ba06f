#pragma once

#include <cstddef>
#include <functional>

namespace mumimo {

// Number of worker threads. Defaults to hardware concurrency, overridable
// with the MUMIMO_WORKERS environment variable (the only env knob).
int worker_count();

// Runs fn(i) for i in [0, n) on a bounded pool. Callers that need
// deterministic reductions must write per-index results and combine them in
// index order afterwards; the pool itself guarantees nothing about order.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace mumimo
