#pragma once

#include <cstddef>
#include <functional>

namespace ddae {

/// Worker count for grid scans. Reads DDAE_NUM_THREADS once; falls back to
/// the hardware concurrency. Results never depend on this value.
unsigned thread_count();

/// Calls body(i) for i in [0, count). Each index is visited exactly once;
/// callers write into slot i of a preallocated buffer so the merge order is
/// the index order regardless of scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace ddae
