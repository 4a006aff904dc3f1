#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace bems {

// Deterministic random helpers on top of std::mt19937_64. The standard
// distributions are implementation-defined, so uniform/normal draws are
// derived here from raw engine output to keep streams reproducible across
// toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    // Modulo bias is negligible for n << 2^64 and keeps the draw count fixed.
    return engine_() % n;
  }

  // Standard normal via Box-Muller (one value per two uniforms; the spare is
  // discarded so the stream stays position-independent).
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace bems
