#pragma once

#include <cstdint>
#include <random>

namespace thermal_cbf {

/// Seeded generator used for every randomized map, scenario, and bench trial.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. The standard distributions are not portable across library
/// implementations, so real and integer draws are derived from the raw 64-bit
/// output here: uniform() takes the top 53 bits and scales by 2^-53, and
/// uniform_int() uses rejection sampling on the raw word.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [lo, hi] inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

/// splitmix64 finalizer; derives independent per-trial seeds from one seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace thermal_cbf
