#pragma once

#include <cstddef>
#include <functional>

namespace fpt {

/// Worker count: FPT_THREADS when set to a positive integer, else hardware concurrency.
int thread_count();

/// Calls body(i) for i in [0, n) on up to thread_count() threads in contiguous blocks.
/// The first exception by index is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace fpt
