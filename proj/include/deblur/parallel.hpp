#pragma once

#include <algorithm>
#include <thread>
#include <vector>

namespace deblur {

namespace detail {
inline bool& in_parallel_region() {
  thread_local bool inside = false;
  return inside;
}
}  // namespace detail

// Block-parallel loop over [begin, end). fn(i) must be independent across i
// (each i writes only its own outputs), which keeps results bit-identical to
// the serial order. Nested calls run serially.
template <typename Fn>
void parallel_for(int begin, int end, Fn&& fn, int min_grain = 64) {
  const int n = end - begin;
  if (n <= 0) return;
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  const int workers = std::min<int>(static_cast<int>(hw), std::max(1, n / std::max(1, min_grain)));
  if (detail::in_parallel_region() || workers <= 1) {
    for (int i = begin; i < end; ++i) fn(i);
    return;
  }
  detail::in_parallel_region() = true;
  const int chunk = (n + workers - 1) / workers;
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (int t = 1; t < workers; ++t) {
    const int lo = begin + t * chunk;
    const int hi = std::min(end, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&fn, lo, hi] {
      detail::in_parallel_region() = true;
      for (int i = lo; i < hi; ++i) fn(i);
      detail::in_parallel_region() = false;
    });
  }
  for (int i = begin; i < std::min(end, begin + chunk); ++i) fn(i);
  for (auto& th : pool) th.join();
  detail::in_parallel_region() = false;
}

}  // namespace deblur
