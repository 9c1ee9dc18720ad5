#pragma once

#include <cstddef>
#include <functional>

namespace roughns {

// Runs fn(i) for i in [0, n) on up to max_threads workers (0 = use the
// ROUGHNS_THREADS budget). Each index owns its output slot, so results are
// deterministic regardless of scheduling. Exceptions are rethrown on the
// caller thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, int max_threads = 0);

}  // namespace roughns
