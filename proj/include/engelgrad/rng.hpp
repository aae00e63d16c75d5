#pragma once

#include <cstdint>

#include "engelgrad/types.hpp"

namespace engelgrad {

// Counter-based seed splitting: every random stream is a pure function of
// (root seed, stream tag, index), so work can be distributed over threads
// without changing results.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream, std::uint64_t index = 0);

// Small deterministic generator (SplitMix64 sequence). Output is identical
// across standard libraries, unlike std::uniform_real_distribution.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal via Box-Muller.
  double normal();

 private:
  std::uint64_t state_;
};

// Halton point (bases 2, 3, 5, 7) with a Cranley-Patterson shift, mapped
// into the box.
Point4 halton_point(std::uint64_t index, const Box& box, const Point4& shift);
Point4 random_shift(std::uint64_t seed);

}  // namespace engelgrad
