#pragma once

#include <cstddef>
#include <functional>

namespace ricker {

// Worker count: RICKER_THREADS (>= 1) if set and parseable, else the
// hardware concurrency. Read on every call so tests can flip it.
unsigned thread_count();

// Runs body(block, begin, end) over a fixed decomposition of [0, n) into
// n_blocks contiguous blocks (block boundaries depend only on n and
// n_blocks, never on the worker count). Blocks are claimed from an atomic
// counter by up to thread_count() workers; with 1 worker, or small n, they
// run inline in block order. Callers that write only into per-block or
// per-index slots and reduce serially over block index afterwards get
// bit-identical results for every thread count. Exceptions from body are
// rethrown on the calling thread (first one wins).
void parallel_for_blocks(
    std::size_t n, std::size_t n_blocks,
    const std::function<void(std::size_t, std::size_t, std::size_t)>& body);

inline constexpr std::size_t kDefaultBlocks = 256;

// Convenience wrapper with the default block count and no block index.
void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace ricker
