#pragma once

#include <cstddef>
#include <functional>

namespace isee {

/// Thread count resolution: explicit argument > ISEE_THREADS env var >
/// hardware concurrency. Always at least 1.
int resolve_threads(int requested = 0);

/// Runs fn(i) for i in [0, n) on `threads` workers. Work is handed out in
/// fixed-size chunks by an atomic cursor; fn must write only to slots owned
/// by index i so results never depend on the schedule.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

/// Chunk width used by deterministic reductions: partial sums are formed
/// per fixed chunk of indices and combined in chunk order, giving the same
/// floating-point result for every thread count.
inline constexpr std::size_t kReduceChunk = 32;

}  // namespace isee
