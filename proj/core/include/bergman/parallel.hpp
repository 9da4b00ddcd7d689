#pragma once

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace bergman {

namespace detail {
inline thread_local bool inside_parallel_region = false;
}

/// Static-chunked parallel loop over [0, count). Each index is processed by
/// a pure function writing only to its own slot, so scheduling never changes
/// results. Nested calls degrade to sequential execution.
inline void parallel_for(std::size_t count,
                         const std::function<void(std::size_t)>& body) {
  const unsigned hw = std::thread::hardware_concurrency();
  if (count < 2 || hw < 2 || detail::inside_parallel_region) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  const std::size_t workers = std::min<std::size_t>(hw, count);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      detail::inside_parallel_region = true;
      for (std::size_t i = w; i < count; i += workers) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace bergman
