#pragma once

#include <functional>

namespace mincomp {

// Runs body(i) for i in [0, count) across `workers` threads on a static
// index partition. Callers give each index its own result slot and reduce
// in index order afterwards, so outputs never depend on the worker count.
// The first exception thrown by any body is rethrown after all join.
void parallel_for(long long count, int workers,
                  const std::function<void(long long)>& body);

}  // namespace mincomp
