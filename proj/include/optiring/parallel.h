#pragma once

#include <cstddef>
#include <functional>

namespace optiring {

/// Worker count: OPTIRING_THREADS when set to a positive integer, otherwise
/// the hardware concurrency (at least 1).
unsigned worker_count();

/// Calls fn(i) for i in [0, count) on a pool of worker_count() threads.
/// Callers write results into slot i, so output order never depends on
/// completion order. Remaining work still runs after a failure; the exception
/// from the lowest failing index is rethrown.
void parallel_for(size_t count, const std::function<void(size_t)>& fn);

}  // namespace optiring
