#include "mslab/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace mslab {

int thread_count() {
  static int count = [] {
    if (const char* env = std::getenv("MSLAB_THREADS")) {
      int n = std::atoi(env);
      if (n >= 1) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
  }();
  return count;
}

void parallel_for(std::int64_t n, const std::function<void(std::int64_t)>& fn) {
  if (n <= 0) return;
  int workers = std::min<std::int64_t>(thread_count(), n);
  if (workers <= 1) {
    for (std::int64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  auto worker = [&] {
    for (;;) {
      std::int64_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= n) return;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (int t = 1; t < workers; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
}

double blocked_sum(std::int64_t n, std::int64_t block_size,
                   const std::function<double(std::int64_t, std::int64_t)>& block_fn) {
  if (n <= 0) return 0.0;
  block_size = std::max<std::int64_t>(1, block_size);
  std::int64_t blocks = (n + block_size - 1) / block_size;
  std::vector<double> partial(blocks);
  parallel_for(blocks, [&](std::int64_t b) {
    std::int64_t lo = b * block_size;
    std::int64_t hi = std::min(n, lo + block_size);
    partial[b] = block_fn(lo, hi);
  });
  KahanSum total;
  for (double p : partial) total.add(p);
  return total.value();
}

}  // namespace mslab
