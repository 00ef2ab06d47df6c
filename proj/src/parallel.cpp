#include "maketex/parallel.hpp"

#include <atomic>

namespace maketex {
namespace {
std::atomic<int> g_threads{0};
}

void set_num_threads(int n) { g_threads.store(std::max(0, n)); }

int num_threads() {
  const int n = g_threads.load();
  if (n > 0) return n;
  return static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
}

}  // namespace maketex
