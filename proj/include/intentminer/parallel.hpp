#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace intentminer {

// Worker count: hardware concurrency, capped by INTENTMINER_THREADS when set.
inline std::size_t worker_count() {
  static const std::size_t n = [] {
    std::size_t w = std::thread::hardware_concurrency();
    if (w == 0) w = 1;
    if (const char* env = std::getenv("INTENTMINER_THREADS")) {
      char* end = nullptr;
      unsigned long cap = std::strtoul(env, &end, 10);
      if (end != env && cap > 0) w = std::min<std::size_t>(w, cap);
    }
    return w;
  }();
  return n;
}

namespace detail {
inline bool& in_parallel_region() {
  thread_local bool flag = false;
  return flag;
}
}  // namespace detail

// Runs fn(i) for i in [0, n). Chunks are static and contiguous, so callers
// that write result[i] get schedule-independent output. Nested calls run
// serially.
template <class F>
void parallel_for(std::size_t n, F&& fn) {
  const std::size_t workers = std::min(worker_count(), n);
  if (n == 0) return;
  if (workers <= 1 || detail::in_parallel_region()) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }

  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> threads;
  threads.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t t = 0; t < workers; ++t) {
    const std::size_t lo = t * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    threads.emplace_back([&, lo, hi] {
      detail::in_parallel_region() = true;
      try {
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : threads) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace intentminer
