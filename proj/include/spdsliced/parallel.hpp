#pragma once

#include <cstddef>
#include <functional>

namespace spdsliced {

/// Worker cap for library-internal loops. 0 means hardware concurrency.
void set_thread_count(unsigned count);
unsigned thread_count();

/// Runs body(i) for i in [0, n) on up to thread_count() workers using static
/// contiguous chunks. Callers write into per-index slots and reduce in order,
/// so results never depend on the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)> &body);

}  // namespace spdsliced
