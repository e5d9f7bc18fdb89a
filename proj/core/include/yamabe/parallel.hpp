#pragma once

#include <cstddef>
#include <functional>

namespace yamabe {

/// Caps the number of worker threads used by per-vertex and per-face loops.
/// 0 restores the default (one worker).
void set_worker_count(unsigned n);
unsigned worker_count();

/// Runs `body(begin, end)` over a partition of [0, n). Each index is handled by
/// exactly one call; partitions never share output slots, so results do not
/// depend on the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace yamabe
