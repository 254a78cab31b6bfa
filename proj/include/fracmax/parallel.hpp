#pragma once

#include <functional>

namespace fracmax {

/// Worker count used by the parallel loops. 0 selects hardware concurrency.
void set_thread_count(int n);
int thread_count();

/// Runs body(begin, end) over contiguous chunks of [0, n). Chunk boundaries
/// depend only on n and the worker count; results must not depend on them.
void parallel_for(long n, const std::function<void(long, long)>& body);

}  // namespace fracmax
