#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

namespace qentropy {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

/// splitmix64. Chosen over std::mt19937 + std::normal_distribution because the
/// standard distributions are not specified bit-for-bit across library vendors,
/// and sweep reports must replay identically everywhere.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += kGoldenGamma);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // 53-bit uniform in [0, 1).
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // 53-bit uniform in (0, 1]; safe as a log argument.
  double uniform_open_zero() noexcept {
    return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
  }

  /// One Box-Muller draw: two independent standard normals packed as re/im.
  /// Consumes exactly two 64-bit outputs (first for the radius, second for the angle).
  std::complex<double> complex_gaussian() noexcept {
    const double u1 = uniform_open_zero();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    return {radius * std::cos(angle), radius * std::sin(angle)};
  }

  double gaussian() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const auto z = complex_gaussian();
    spare_ = z.imag();
    has_spare_ = true;
    return z.real();
  }

  std::uint64_t uniform_index(std::uint64_t n) noexcept { return n == 0 ? 0 : next() % n; }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Seed of the independent stream used by trial `index` of a sweep seeded with `seed`.
constexpr std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  return seed ^ (index * kGoldenGamma);
}

}  // namespace qentropy
