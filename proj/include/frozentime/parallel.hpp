#pragma once

#include <functional>

namespace frozentime {

/// Number of worker threads to use: hardware concurrency, capped by the
/// FROZEN_TIME_THREADS environment variable when set.
int worker_thread_count();

/// Runs fn(i) for i in [begin, end) on up to worker_thread_count() threads.
/// fn must be safe to call concurrently for distinct indices.
void parallel_for(int begin, int end, const std::function<void(int)>& fn);

} // namespace frozentime
