#pragma once

#include <cstdint>
#include <random>

namespace sensopt {

/// Deterministic uniform sampler. mt19937_64 output is pinned by the standard;
/// std::uniform_real_distribution is not, so the [0,1) mapping is done by hand
/// to keep seeded runs bit-identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform double in [0, 1), 53 random mantissa bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace sensopt
