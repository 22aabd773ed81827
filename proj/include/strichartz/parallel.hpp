#pragma once

#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace strichartz {

// Worker-pool width. STRICHARTZ_LAB_THREADS bounds it; results never depend
// on the schedule (callers write to disjoint slots and reduce in index order).
inline int worker_count() {
  static const int n = [] {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw < 1) hw = 1;
    if (const char* env = std::getenv("STRICHARTZ_LAB_THREADS")) {
      const long v = std::strtol(env, nullptr, 10);
      if (v >= 1 && v < 256) hw = static_cast<int>(v);
    }
    return hw;
  }();
  return n;
}

template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const int workers = worker_count();
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto body = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  const int spawn = static_cast<int>(std::min<std::size_t>(workers, n)) - 1;
  pool.reserve(spawn);
  for (int t = 0; t < spawn; ++t) pool.emplace_back(body);
  body();
  for (auto& th : pool) th.join();
}

}  // namespace strichartz
