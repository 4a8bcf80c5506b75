#pragma once

#include <cstddef>
#include <functional>

namespace flatflow {

/// Worker count used by parallel_for. An explicit setting wins, then the
/// FLATFLOW_THREADS environment variable, then the hardware concurrency.
std::size_t thread_count();
void set_thread_count(std::size_t n);  // 0 restores the default

/// Runs body(i) for i in [0, n). Items are independent; callers write results
/// into per-index slots so the outcome does not depend on scheduling. If any
/// item throws, the exception of the lowest failing index is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace flatflow
