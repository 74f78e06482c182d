#include "robustpr/random.hpp"

#include <cmath>
#include <numbers>

namespace robustpr {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

}  // namespace

std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_stream(std::uint64_t master, std::uint64_t tag) noexcept {
  return splitmix64_mix(master + (tag + 1) * kGolden);
}

std::uint64_t trial_seed(std::uint64_t master, std::uint64_t n, std::uint64_t trial) noexcept {
  return splitmix64_mix(derive_stream(master, n) ^ splitmix64_mix(trial + kGolden));
}

Rng::Rng(std::uint64_t seed) noexcept {
  std::uint64_t x = seed;
  for (auto& s : s_) {
    x += kGolden;
    s = splitmix64_mix(x);
  }
}

std::uint64_t Rng::next() noexcept {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform01() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double Rng::normal() noexcept {
  const double u1 = uniform01();
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::complex<double> Rng::complex_normal() noexcept {
  const double re = normal();
  const double im = normal();
  return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
}

double Rng::laplace(double scale) noexcept {
  const double u = uniform01() - 0.5;
  const double mag = -scale * std::log1p(-2.0 * std::abs(u));
  return u < 0 ? -mag : mag;
}

std::uint64_t Rng::index(std::uint64_t m) noexcept {
  const auto k = static_cast<std::uint64_t>(uniform01() * static_cast<double>(m));
  return k < m ? k : m - 1;
}

}  // namespace robustpr
