#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace stoqmc::detail {

/// Runs fn(block) for block in [0, blocks) on up to `threads` workers. Blocks
/// are handed out statically, so any reduction that combines per-block
/// results in block order is independent of the thread count.
template <typename Fn>
void parallel_blocks(std::size_t blocks, int threads, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(blocks, static_cast<std::size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (std::size_t b = 0; b < blocks; ++b) fn(b);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t b = w; b < blocks; b += workers) fn(b);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace stoqmc::detail
