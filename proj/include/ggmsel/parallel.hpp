#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace ggmsel {

/// Thread count from GGMSEL_THREADS, or 1 when unset or unparsable.
inline int default_thread_count() {
  if (const char* env = std::getenv("GGMSEL_THREADS")) {
    try {
      const int t = std::stoi(env);
      if (t >= 1) return t;
    } catch (...) {
    }
  }
  return 1;
}

/// Runs fn(i) for i in [0, count) on up to `threads` workers. Each index is
/// an independent task that writes only its own output slot, so any schedule
/// produces the same result. If tasks throw, the exception from the lowest
/// index is rethrown after all workers finish.
template <typename Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
  const std::size_t workers =
      std::min<std::size_t>(count, static_cast<std::size_t>(std::max(threads, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }

  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  pool.clear();

  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace ggmsel
