#pragma once

#include <cstddef>
#include <cstdlib>
#include <thread>
#include <vector>

namespace mhl {

/// Worker cap: MHL_THREADS if set (>= 1), else hardware concurrency.
inline int max_threads() {
  if (const char* env = std::getenv("MHL_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

/// Runs body(i) for i in [0, n). Results must be written to per-index
/// storage by the body so the outcome is independent of scheduling.
template <typename Body>
void parallel_for(std::size_t n, Body&& body) {
  const int threads = max_threads();
  if (threads <= 1 || n < 2048) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  const std::size_t workers = std::min<std::size_t>(threads, n);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace mhl
