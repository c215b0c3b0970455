#pragma once

#include <cstddef>
#include <functional>

namespace ldplab {

/// Runs fn(i) for i in [0, n) across hardware threads. Callers write
/// results into preallocated slots indexed by i, so the outcome does not
/// depend on scheduling. Set LDPLAB_THREADS to override the thread count.
void parallel_for(size_t n, const std::function<void(size_t)>& fn);

} // namespace ldplab
