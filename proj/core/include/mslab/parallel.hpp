#pragma once

#include <cstdint>
#include <functional>

namespace mslab {

// Number of worker threads. Reads MSLAB_THREADS once; falls back to the
// hardware count. Results of all parallel helpers below are independent of
// this value.
int thread_count();

// Runs fn(i) for i in [0, n). Each index owns its output slot, so the result
// is deterministic for any thread count. fn must not throw.
void parallel_for(std::int64_t n, const std::function<void(std::int64_t)>& fn);

// Compensated (Kahan) accumulator; used so that fixed-order summations are
// insensitive to per-block rounding.
class KahanSum {
 public:
  void add(double x) {
    double y = x - compensation_;
    double t = sum_ + y;
    compensation_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

// Sum of block_fn(lo, hi) over fixed-size blocks of [0, n). Blocks are
// evaluated in parallel but combined serially in index order, so the value
// does not depend on the thread count.
double blocked_sum(std::int64_t n, std::int64_t block_size,
                   const std::function<double(std::int64_t, std::int64_t)>& block_fn);

}  // namespace mslab
