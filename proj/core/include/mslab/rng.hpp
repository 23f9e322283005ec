#pragma once

#include <cstdint>

namespace mslab {

// Identifies one reproducible random stream. Equal (seed, stream) pairs
// always produce the same draw sequence, independent of thread scheduling.
// Parallel code derives one child stream per work item (trial, batch, ...).
struct RandomSource {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  RandomSource child(std::uint64_t index) const;
};

// xoshiro256++ with splitmix64 stream seeding (public-domain algorithms by
// Blackman/Vigna). Hand-rolled so that sequences are identical across
// standard libraries and platforms; std:: distributions are not pinned.
class Rng {
 public:
  explicit Rng(RandomSource source);

  std::uint64_t next_u64();

  // Uniform in [0, 1), 53-bit resolution.
  double uniform();
  double uniform(double lo, double hi);

  // Standard normal via Box-Muller; no rejection, so the draw count per
  // call is fixed and streams stay aligned.
  double normal();

 private:
  std::uint64_t state_[4];
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace mslab
