#pragma once

#include <cstddef>
#include <functional>

namespace fsk {

/// Worker cap from the FSK_THREADS environment variable (0 or unset means
/// hardware concurrency). Always at least 1.
std::size_t worker_count();

/// Splits [0, n) into contiguous chunks and runs body(begin, end) on each,
/// possibly concurrently. Chunk boundaries depend only on n and the worker
/// count; callers that reduce must combine per-index results themselves.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t min_chunk = 256);

}  // namespace fsk
