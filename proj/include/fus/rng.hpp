// Seedable portable random source.
//
// Engine: std::mt19937_64, whose output sequence is fixed by the standard.
// Conversions to doubles/normals/integers are done here rather than with
// <random> distributions, which are implementation-defined.
//
// Stream splitting: stream(seed, a, b, c) seeds the engine with
//   h = splitmix64(seed); h = splitmix64(h ^ a); h = splitmix64(h ^ b); h = splitmix64(h ^ c)
// so every (frame, part, purpose) triple gets an independent, reproducible
// sequence no matter which thread consumes it.
#pragma once

#include <cstdint>
#include <random>

namespace fus {

std::uint64_t splitmix64(std::uint64_t x);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static Rng stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0);

  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Uniform in (0, 1].
  double uniform_pos() { return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal via Box-Muller (one variate per call).
  double normal();
  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
};

}  // namespace fus
