#pragma once

#include <complex>
#include <cstdint>
#include <limits>

namespace robustpr {

/// SplitMix64 finalizer. Used for seed expansion and stream derivation.
std::uint64_t splitmix64_mix(std::uint64_t z) noexcept;

/// Seed of an independent sub-stream: splitmix64_mix(master + (tag + 1) * 0x9E3779B97F4A7C15).
std::uint64_t derive_stream(std::uint64_t master, std::uint64_t tag) noexcept;

/// Seed for trial `trial` at measurement count `n` of an experiment. Adding
/// grid points never changes the seeds of other (n, trial) cells.
std::uint64_t trial_seed(std::uint64_t master, std::uint64_t n, std::uint64_t trial) noexcept;

/// Stream tags used by instance synthesis.
enum class StreamTag : std::uint64_t { Signal = 1, Sampling = 2, Noise = 3, SpectralStart = 4, Holdout = 5 };

inline std::uint64_t derive_stream(std::uint64_t master, StreamTag tag) noexcept {
  return derive_stream(master, static_cast<std::uint64_t>(tag));
}

/// xoshiro256** (Blackman & Vigna), state filled by four SplitMix64 steps
/// from the seed. Satisfies UniformRandomBitGenerator. Variates:
///
///  - uniform01:  (next() >> 11) * 2^-53, in [0, 1)
///  - normal:     Box-Muller, one pair of uniforms per draw,
///                sqrt(-2 ln(1 - u1)) * cos(2 pi u2)
///  - complex_normal: (normal + i normal) / sqrt(2), E|z|^2 = 1
///  - laplace(b): u = uniform01 - 1/2, -b sign(u) ln(1 - 2|u|)
///  - index(m):   floor(uniform01 * m)
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept { return next(); }
  result_type next() noexcept;

  double uniform01() noexcept;
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform01(); }
  double normal() noexcept;
  std::complex<double> complex_normal() noexcept;
  double laplace(double scale) noexcept;
  std::uint64_t index(std::uint64_t m) noexcept;

 private:
  std::uint64_t s_[4];
};

}  // namespace robustpr
