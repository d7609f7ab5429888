#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace ggk {

// Worker count: explicit argument > GGK_THREADS env > 1.
inline int resolve_threads(int requested = 0) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("GGK_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 1;
}

// Static block partition of [0, n). Each index is processed exactly once and
// results must be written to per-index slots, so the outcome is independent
// of the worker count.
inline void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body) {
  threads = resolve_threads(threads);
  if (threads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::size_t workers = std::min<std::size_t>(threads, n);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

} // namespace ggk
