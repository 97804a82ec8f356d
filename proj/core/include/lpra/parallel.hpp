#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace lpra {

/// Runs fn(i) for i in [0, count) across a fixed static partition of worker
/// threads. Each index writes only its own output slot, so results are
/// independent of thread scheduling; any cross-index reduction must be done
/// by the caller afterwards, in index order. The first exception thrown by
/// any index is rethrown on the calling thread.
inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn,
                         std::size_t min_grain = 8) {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  std::size_t workers = std::min<std::size_t>(hw, count / min_grain + 1);
  if (workers <= 1 || count == 0) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::exception_ptr first_error;
  std::mutex error_mu;
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&, w]() {
      try {
        for (std::size_t i = w; i < count; i += workers) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace lpra
