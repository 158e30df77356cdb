#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>

namespace lawn {

/// SplitMix64 (Steele, Lea, Flood 2014) with explicit, portable derivations
/// so another implementation can reproduce every draw from the seed alone:
///
///   next():      state += 0x9E3779B97F4A7C15; return mix64(state)
///   uniform01(): (next() >> 11) * 2^-53                       in [0, 1)
///   normal():    Box-Muller, u1 = 1 - uniform01(), u2 = uniform01(),
///                sqrt(-2 ln u1) * cos(2 pi u2); one draw per call
///   stream(seed, index): state = mix64(seed) ^ mix64(index + 0x9E3779B97F4A7C15)
///
/// std:: distributions are deliberately not used: their algorithms are
/// implementation-defined.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) noexcept : state_(seed) {}

  /// Independent stream for (experiment seed, trial/stage index).
  static Rng stream(std::uint64_t seed, std::uint64_t index) noexcept;

  static std::uint64_t mix64(std::uint64_t z) noexcept;

  std::uint64_t next() noexcept;
  std::uint64_t operator()() noexcept { return next(); }
  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  double uniform01() noexcept;
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform01(); }
  /// floor(uniform01() * n); n must be > 0.
  std::size_t index(std::size_t n) noexcept;
  double normal(double mean, double stddev) noexcept;

 private:
  std::uint64_t state_;
};

}  // namespace lawn
