#pragma once

// Counter-based random numbers. Every draw is a pure function of (seed, counters), so
// fields refined on a finer grid reuse the same draws on the modes they share with the
// coarse grid, and results do not depend on evaluation order or thread count.

#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <numbers>

namespace dkg {

/// splitmix64 finalizer (Steele, Lea, Flood 2014): a bijective 64-bit mixer.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Hashes a seed and a list of signed counters into one 64-bit key.
inline std::uint64_t counter_key(std::uint64_t seed, std::initializer_list<std::int64_t> counters) {
  std::uint64_t h = splitmix64(seed);
  for (std::int64_t c : counters) h = splitmix64(h ^ static_cast<std::uint64_t>(c));
  return h;
}

/// Uniform in (0, 1], 53 bits.
inline double unit_uniform(std::uint64_t key) {
  return (static_cast<double>(key >> 11) + 1.0) * 0x1.0p-53;
}

/// Standard complex Gaussian (E|z|^2 = 1) by Box-Muller on two derived uniforms.
template <typename Real = double>
std::complex<Real> complex_gaussian(std::uint64_t key) {
  const double u1 = unit_uniform(splitmix64(key ^ 0x5851f42d4c957f2dULL));
  const double u2 = unit_uniform(splitmix64(key ^ 0x14057b7ef767814fULL));
  const double r = std::sqrt(-std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  return {Real(r * std::cos(theta)), Real(r * std::sin(theta))};
}

/// Sequential stream over the same mixer, for samplers that need many draws.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::uint64_t state_;
};

}  // namespace dkg
