#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace quadropt {

// Worker count: QUADROPT_THREADS if set (>= 1), otherwise the hardware
// concurrency.
inline unsigned thread_count() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char *env = std::getenv("QUADROPT_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1)
      return static_cast<unsigned>(v);
  }
  return hw;
}

namespace detail {
inline thread_local bool inside_parallel_for = false;
}

// Runs body(i) for i in [0, n). Each index is handled by exactly one worker,
// so writes to per-index slots need no synchronisation. The first exception
// thrown by any worker is rethrown on the calling thread. Nested calls run
// serially on the worker that makes them.
template <class Body> void parallel_for(std::size_t n, Body &&body) {
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(thread_count(), n));
  if (workers <= 1 || detail::inside_parallel_for) {
    for (std::size_t i = 0; i < n; ++i)
      body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&] {
    const bool outer = detail::inside_parallel_for;
    detail::inside_parallel_for = true;
    try {
      for (std::size_t i = next++; i < n; i = next++)
        body(i);
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!error)
        error = std::current_exception();
      next = n;
    }
    detail::inside_parallel_for = outer;
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (unsigned w = 1; w < workers; ++w)
    pool.emplace_back(run);
  run();
  for (auto &t : pool)
    t.join();
  if (error)
    std::rethrow_exception(error);
}

} // namespace quadropt
