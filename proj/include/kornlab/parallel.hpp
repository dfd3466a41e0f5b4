#pragma once

#include <cstddef>
#include <functional>

namespace kornlab {

/// Worker cap: KORNLAB_THREADS when set to a positive integer, otherwise the
/// hardware concurrency.
unsigned thread_limit();

/// Runs body(i) for i in [0, count) on at most thread_limit() threads.
/// Each index is handled exactly once; results must be written to
/// index-addressed storage so output order is independent of scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace kornlab
