#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace ewad {

// Number of worker threads to use when the caller passes 0 ("auto").
inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs body(i) for i in [0, count) on `threads` workers.  Work items are
// claimed from a shared atomic counter, so long items do not stall the pool.
// Each item must write its result into a slot addressed by its own index;
// callers then reduce sequentially in index order, which makes every
// aggregate bit-identical regardless of the thread count.
inline void parallel_for_index(std::size_t count, int threads,
                               const std::function<void(std::size_t)>& body) {
  threads = resolve_threads(threads);
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&]() {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  int spawn = threads - 1;
  pool.reserve(static_cast<std::size_t>(spawn));
  for (int t = 0; t < spawn; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace ewad
