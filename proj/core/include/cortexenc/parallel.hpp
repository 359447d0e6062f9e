#pragma once

#include <cstddef>
#include <exception>
#include <functional>

namespace cortexenc {

// Process-wide worker count used by parallel_for. Values < 1 mean 1.
void set_thread_count(int threads);
int thread_count();

// Runs body(i) for i in [0, n) over a static block partition. Callers only
// write to slots owned by i, so results never depend on the thread count.
// The first exception thrown by any worker is rethrown on the caller.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace cortexenc
