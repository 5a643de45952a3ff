#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace elan {

// 0 or negative request means "use all hardware threads".
inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

// Runs fn(lo, hi) over contiguous chunks covering [0, n), one chunk per
// worker.  fn must be safe to call concurrently on disjoint ranges; the first
// exception thrown by any worker is rethrown on the calling thread.
inline void parallel_chunks(
    std::size_t n, int threads,
    const std::function<void(std::size_t, std::size_t)>& fn) {
  std::size_t nt = std::min<std::size_t>(
      static_cast<std::size_t>(resolve_threads(threads)), n ? n : 1);
  if (nt <= 1) {
    if (n) fn(0, n);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  std::size_t chunk = (n + nt - 1) / nt;
  for (std::size_t t = 0; t < nt; ++t) {
    std::size_t lo = t * chunk;
    std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] {
      try {
        fn(lo, hi);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

// Runs fn(i) for i in [0, n), split into contiguous chunks, one per worker.
inline void parallel_for(std::size_t n, int threads,
                         const std::function<void(std::size_t)>& fn) {
  parallel_chunks(n, threads, [&fn](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) fn(i);
  });
}

}  // namespace elan
