#ifndef CIFTI_PARALLEL_HPP
#define CIFTI_PARALLEL_HPP

#include "cifti/types.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace cifti {

//! Number of workers to use when the caller asks for 0 (= all cores).
inline unsigned resolve_threads(unsigned requested) {
  if(requested > 0)
    return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

//! Runs body(i) for i in [0, n) on up to @p threads workers.
//!
//! Work is handed out one index at a time, so results must only depend on i.
//! The first exception thrown by any task is rethrown after all workers join.
template <class Body> void parallel_for(t_index n, unsigned threads, Body &&body) {
  unsigned const workers = static_cast<unsigned>(std::min<t_index>(resolve_threads(threads), n));
  if(workers <= 1) {
    for(t_index i = 0; i < n; ++i)
      body(i);
    return;
  }
  std::atomic<t_index> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run = [&] {
    for(t_index i = next++; i < n; i = next++) {
      try {
        body(i);
      } catch(...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if(!failure)
          failure = std::current_exception();
        next = n;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for(unsigned w = 1; w < workers; ++w)
    pool.emplace_back(run);
  run();
  for(auto &t : pool)
    t.join();
  if(failure)
    std::rethrow_exception(failure);
}

} // namespace cifti

#endif
