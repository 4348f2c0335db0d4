#pragma once

#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace dascof {

// Static chunked parallel loop. Each index must write only its own slots;
// reductions happen afterwards in a fixed serial order so results do not
// depend on the schedule.
template <typename Body>
void parallel_for(long long n, Body&& body) {
  if (n <= 0) return;
  unsigned workers = std::thread::hardware_concurrency();
  if (workers == 0) workers = 1;
  if (static_cast<long long>(workers) > n) workers = static_cast<unsigned>(n);
  if (workers <= 1) {
    for (long long i = 0; i < n; ++i) body(i);
    return;
  }

  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const long long chunk = (n + workers - 1) / workers;
  for (unsigned t = 0; t < workers; ++t) {
    const long long begin = static_cast<long long>(t) * chunk;
    const long long end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&, begin, end] {
      try {
        for (long long i = begin; i < end; ++i) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace dascof
