#pragma once

#include <cstddef>
#include <functional>

namespace smpe {

/// Thread count from the SMPE_THREADS environment variable, falling back to
/// the hardware concurrency (at least 1).
std::size_t default_threads();

/// Calls fn(k) for k in [0, n) on up to `threads` threads (0 means
/// default_threads()). Indices are handed out in contiguous blocks; fn must
/// only write to state owned by its index. The first exception thrown by any
/// call is rethrown after all threads finish.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn);

}  // namespace smpe
