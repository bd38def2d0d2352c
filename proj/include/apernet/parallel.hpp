#pragma once

#include <cstddef>
#include <functional>

namespace apernet {

// Global worker count. 0 means "unset": falls back to APERNET_THREADS, then
// hardware concurrency. All parallel loops use static index partitioning and
// write to disjoint slots, so results do not depend on the worker count.
void set_thread_count(int n);
int thread_count();

// Runs fn(i) for i in [0, n). Static block partition, no work stealing.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

// Runs fn(begin, end) on disjoint contiguous ranges covering [0, n).
void parallel_ranges(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace apernet
