#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace tivm {

// Runs body(i) for i in [0, count). Iterations must be independent and write
// only to slot i of their outputs, so results do not depend on the thread
// count. Small workloads run inline.
template <typename Body>
void parallel_for(std::size_t count, std::size_t work_per_item, Body&& body) {
  constexpr std::size_t kMinParallelWork = std::size_t{1} << 18;
  const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t threads = std::min(hw, count);
  if (threads <= 1 || count * work_per_item < kMinParallelWork) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    const std::size_t chunk = (count + threads - 1) / threads;
    for (std::size_t t = 0; t < threads; ++t) {
      const std::size_t begin = t * chunk;
      const std::size_t end = std::min(count, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back([begin, end, &body, &error = errors[t]] {
        try {
          for (std::size_t i = begin; i < end; ++i) body(i);
        } catch (...) {
          error = std::current_exception();
        }
      });
    }
  }
  for (auto& error : errors)
    if (error) std::rethrow_exception(error);
}

}  // namespace tivm
