#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace lidarsynth {

inline int resolve_workers(int workers) {
  if (workers > 0) return workers;
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

/// Runs fn(begin, end) over contiguous chunks of [0, count). Each index is
/// handled exactly once; callers write to disjoint slots so the result is
/// independent of the worker count. The first exception (by chunk order) is
/// rethrown after all chunks finish.
template <typename Fn>
void parallel_for_chunks(std::size_t count, int workers, Fn&& fn) {
  const std::size_t n =
      std::min<std::size_t>(resolve_workers(workers), std::max<std::size_t>(count, 1));
  if (n <= 1) {
    fn(std::size_t{0}, count);
    return;
  }
  const std::size_t step = (count + n - 1) / n;
  std::vector<std::exception_ptr> errors(n);
  {
    std::vector<std::jthread> pool;
    pool.reserve(n);
    std::size_t chunk = 0;
    for (std::size_t begin = 0; begin < count; begin += step, ++chunk) {
      const std::size_t end = std::min(count, begin + step);
      pool.emplace_back([&fn, &errors, chunk, begin, end] {
        try {
          fn(begin, end);
        } catch (...) {
          errors[chunk] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace lidarsynth
