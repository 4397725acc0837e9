#pragma once

#include <atomic>
#include <thread>
#include <vector>

namespace longrun {

inline int& worker_thread_count() {
  static int count = 1;
  return count;
}

inline void set_worker_threads(int n) { worker_thread_count() = n < 1 ? 1 : n; }

/// Runs f(0..n-1) on the configured worker pool. Each index writes only
/// its own output slot, so results are identical for any thread count.
template <typename F>
void parallel_for(int n, F&& f) {
  const int threads = std::min(worker_thread_count(), n);
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      int i;
      while ((i = next.fetch_add(1)) < n) f(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace longrun
