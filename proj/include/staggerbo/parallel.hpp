#pragma once

#include <functional>

namespace stagger {

/// Run fn(0..n-1) across up to `jobs` threads (0 = hardware concurrency).
/// Tasks must be independent; the first thrown exception is rethrown on
/// the calling thread after all workers join.
void parallel_for(int n, const std::function<void(int)>& fn, int jobs = 0);

}  // namespace stagger
