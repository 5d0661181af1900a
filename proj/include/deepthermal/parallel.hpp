#pragma once

#include <cstddef>
#include <functional>

namespace deepthermal {

/// Worker count for parallel_for (0 = hardware concurrency).
void set_thread_count(unsigned threads);
unsigned thread_count();

/// Runs body(i) for i in [0, n). Tasks write to disjoint, index-addressed
/// slots, so results do not depend on scheduling. The first exception thrown
/// by any task is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace deepthermal
