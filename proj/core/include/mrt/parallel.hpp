#pragma once

#include <cstddef>
#include <functional>

namespace mrt {

/// Process-wide worker count used by parallel loops. 0 selects hardware concurrency.
void set_thread_count(unsigned n);
unsigned thread_count();

/// Runs body(i) for i in [0, n) on the worker pool. Indices are handed out
/// dynamically; body must write only to slot i of its outputs so results do not
/// depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// Fixed chunk size used by Monte Carlo reductions. Partial sums are formed per
/// chunk and combined in chunk order, which makes results independent of the
/// thread count.
inline constexpr std::size_t kReductionChunk = 1u << 15;

}  // namespace mrt
