#pragma once

// parallel.hpp - block-partitioned parallel_for over index ranges.
//
// Workers own disjoint output ranges, so results never depend on the thread
// count; exceptions from workers are rethrown on the caller.

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace isar {

inline unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

/// body(begin, end) is invoked on disjoint chunks covering [0, n).
template <typename Body>
void parallel_for_chunks(std::size_t n, unsigned threads, Body&& body) {
  threads = resolve_threads(threads);
  if (n == 0) return;
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    body(std::size_t{0}, n);
    return;
  }

  const std::size_t chunk = (n + threads - 1) / threads;
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads - 1);

  auto run = [&](std::size_t begin, std::size_t end) {
    try {
      body(begin, end);
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!first_error) first_error = std::current_exception();
    }
  };

  for (unsigned t = 1; t < threads; ++t) {
    const std::size_t begin = std::min<std::size_t>(t * chunk, n);
    const std::size_t end = std::min<std::size_t>(begin + chunk, n);
    if (begin < end) pool.emplace_back(run, begin, end);
  }
  run(0, std::min<std::size_t>(chunk, n));
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace isar
