#ifndef PCOR_RNG_HPP
#define PCOR_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace pcor {

/// SplitMix64 step; used for seed derivation and stream splitting.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seeded random source. Every randomized operation in the library takes one of
/// these explicitly; there is no ambient global randomness. The engine is
/// std::mt19937_64, whose output sequence is fixed by the standard, and all
/// variate conversions below avoid std::*_distribution so that a seed fully
/// determines behaviour on any platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n); n must be positive. Rejection sampling, no modulo bias.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  bool bernoulli(double p) { return next_double() < p; }

  /// Standard normal via Box-Muller (deterministic given the seed).
  double next_gaussian() {
    const double u1 = 1.0 - next_double();  // (0, 1], keeps log finite
    const double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

  /// Child source with a state derived from (and advancing) this one.
  /// Independent repetitions each own a split source.
  Rng split() {
    std::uint64_t s = next_u64();
    return Rng(splitmix64(s));
  }

  /// Stable seed derivation for indexed work items (repetition i of target j, ...).
  static std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0,
                                   std::uint64_t c = 0) {
    std::uint64_t s = base;
    std::uint64_t z = splitmix64(s);
    s = z ^ (a * 0x9e3779b97f4a7c15ULL);
    z = splitmix64(s);
    s = z ^ (b * 0xc2b2ae3d27d4eb4fULL);
    z = splitmix64(s);
    s = z ^ (c * 0x165667b19e3779f9ULL);
    return splitmix64(s);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace pcor

#endif  // PCOR_RNG_HPP
