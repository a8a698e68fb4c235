#pragma once

#include <cstddef>
#include <functional>

namespace smnp {

/// Worker count: SMNP_THREADS when set (>= 1), else the hardware count.
int thread_budget();

/// Runs body(0..count-1) on up to thread_budget() threads. Calls made from
/// inside a running body execute inline. The first exception thrown by any
/// body is rethrown after all workers finish.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace smnp
