#pragma once

#include <cstddef>
#include <functional>

namespace gapedge {

/// Worker count: hardware concurrency, capped by GAPEDGE_THREADS when set.
std::size_t worker_count();

/// Calls fn(i) for i in [0, n) across worker_count() threads. The first
/// exception thrown by any task is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace gapedge
