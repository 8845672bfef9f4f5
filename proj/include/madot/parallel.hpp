#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace madot {

/// Worker count for parallel sections: MADOT_NUM_THREADS if set, else hardware.
inline int thread_count() {
  if (const char* env = std::getenv("MADOT_NUM_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs fn(i) for i in [0, n). Each index is visited exactly once; fn must only
/// write to per-index slots so results do not depend on the thread count.
inline void parallel_for(int n, const std::function<void(int)>& fn) {
  int workers = thread_count();
  if (workers <= 1 || n < 64) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  if (workers > n) workers = n;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int t = 0; t < workers; ++t) {
    pool.emplace_back([=, &fn] {
      for (int i = t; i < n; i += workers) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace madot
