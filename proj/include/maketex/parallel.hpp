#pragma once

#include <algorithm>
#include <thread>
#include <vector>

namespace maketex {

// Worker cap for internal parallel loops; 0 restores the hardware default.
void set_num_threads(int n);
int num_threads();

// Splits [begin, end) into contiguous chunks, one per worker. `fn(lo, hi)`
// must only write state owned by its chunk.
template <class Fn>
void parallel_for(int begin, int end, Fn&& fn) {
  const int total = end - begin;
  if (total <= 0) return;
  const int workers = std::min(num_threads(), total);
  if (workers <= 1) {
    fn(begin, end);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  const int chunk = (total + workers - 1) / workers;
  for (int w = 1; w < workers; ++w) {
    const int lo = begin + w * chunk;
    const int hi = std::min(end, lo + chunk);
    if (lo < hi) pool.emplace_back([&fn, lo, hi] { fn(lo, hi); });
  }
  fn(begin, std::min(end, begin + chunk));
}

}  // namespace maketex
