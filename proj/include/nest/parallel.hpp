#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <limits>
#include <thread>
#include <vector>

namespace nest {

//! Runs body(i) for i in [0, n) on up to `threads` workers with a static
//! interleaved schedule. Callers write results into per-index slots, so the
//! output never depends on the thread count. If bodies throw, the exception
//! of the smallest failing index is rethrown after all workers join.
template <typename Body>
void
parallel_for(std::ptrdiff_t n, int threads, Body&& body)
{
  if (n <= 0)
    return;
  const auto workers = static_cast<std::ptrdiff_t>(
    std::clamp<std::ptrdiff_t>(threads, 1, n));
  if (workers == 1) {
    for (std::ptrdiff_t i = 0; i < n; ++i)
      body(i);
    return;
  }

  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  std::vector<std::ptrdiff_t> error_at(
    static_cast<std::size_t>(workers), std::numeric_limits<std::ptrdiff_t>::max());
  {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (std::ptrdiff_t t = 0; t < workers; ++t) {
      pool.emplace_back([&, t] {
        for (std::ptrdiff_t i = t; i < n; i += workers) {
          try {
            body(i);
          } catch (...) {
            errors[static_cast<std::size_t>(t)] = std::current_exception();
            error_at[static_cast<std::size_t>(t)] = i;
            return;
          }
        }
      });
    }
  }

  auto first = std::min_element(error_at.begin(), error_at.end());
  if (*first != std::numeric_limits<std::ptrdiff_t>::max())
    std::rethrow_exception(errors[static_cast<std::size_t>(first - error_at.begin())]);
}

//! Resolves a requested thread count; 0 means hardware concurrency.
inline int
resolve_threads(int requested)
{
  if (requested > 0)
    return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

} // namespace nest
