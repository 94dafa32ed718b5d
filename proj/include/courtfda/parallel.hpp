#pragma once

#include <cstddef>
#include <functional>

namespace courtfda {

/// Worker count to use. A nonzero request wins; otherwise COURT_FDA_THREADS,
/// otherwise the hardware concurrency.
std::size_t resolve_threads(std::size_t requested);

/// Runs body(i) for i in [0, n). Each index is handled by exactly one worker,
/// so bodies that only write to slot i give order-independent results. If any
/// body throws, the exception of the lowest failing index is rethrown.
void parallel_for(std::size_t n, std::size_t threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace courtfda
