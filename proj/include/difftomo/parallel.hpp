#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace difftomo {

/// Thread cap for parallel_for. 0 = hardware concurrency.
void set_max_threads(int n);
int max_threads();

/// Splits [0, n) into fixed-size blocks and runs fn(block_index, begin, end)
/// over them. The block layout depends only on (n, grain), never on the
/// thread count, so callers that keep one accumulator per block and merge
/// them in block order get the same floating-point result for any number of
/// threads. Nested calls run inline on the calling thread.
///
/// Returns the number of blocks (also available upfront via block_count).
size_t parallel_for_blocks(size_t n, size_t grain,
                           const std::function<void(size_t, size_t, size_t)>& fn);

size_t block_count(size_t n, size_t grain);

/// Convenience wrapper when per-element work is independent.
void parallel_for(size_t n, size_t grain, const std::function<void(size_t)>& fn);

}  // namespace difftomo
