#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace hfd {

//! Worker count: HFD_THREADS when set and positive, hardware concurrency
//! otherwise (0 also means auto).
inline unsigned thread_count()
{
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("HFD_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0)
      return static_cast<unsigned>(v);
  }
  return hw;
}

//! Calls body(begin, end) over contiguous chunks of [0, n). Chunk boundaries
//! only depend on n and the worker count; each index is visited once.
template<class Body>
void parallel_for(std::size_t n, Body&& body)
{
  const unsigned workers =
    static_cast<unsigned>(std::min<std::size_t>(thread_count(), n));
  if (workers <= 1) {
    if (n > 0)
      body(std::size_t{ 0 }, n);
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const std::size_t chunk = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end)
      break;
    pool.emplace_back([&, begin, end] {
      try {
        body(begin, end);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure)
          failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool)
    t.join();
  if (failure)
    std::rethrow_exception(failure);
}

} // namespace hfd
