#pragma once

#include <cstddef>
#include <functional>

namespace dmcore {

// Process-wide worker count. 0 means "hardware concurrency".
void set_thread_count(int threads);
int thread_count();

// Runs fn(i) for i in [0, n) on a fixed 64-way chunk grid. Chunk boundaries
// do not depend on the thread count, and each result slot is written by
// exactly one invocation, so outputs are identical for any --threads value.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace dmcore
