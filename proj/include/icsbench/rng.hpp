#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string_view>

namespace icsbench::rng {

/// FNV-1a over a string, used to derive per-purpose seeds from a global one.
inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Deterministic child seed for a named sub-stream.
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view tag) {
  return splitmix64(base ^ fnv1a64(tag));
}

/// Seeded Gaussian deviate stream: mt19937_64 driving an explicit Box-Muller
/// transform. std::normal_distribution is implementation-defined, so runs
/// would not reproduce across standard libraries; this pins the algorithm.
/// Config files record the name so ports can match it or fall back to
/// comparing statistics.
class GaussianStream {
public:
  static constexpr const char* kAlgorithm = "mt19937_64/box-muller-v1";

  explicit GaussianStream(std::uint64_t seed) : eng_(seed) {}

  /// Standard normal deviate.
  double next() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    const double u1 = uniform_open01();
    const double u2 = uniform_open01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    cached_ = radius * std::sin(angle);
    has_cached_ = true;
    return radius * std::cos(angle);
  }

  double next(double mean, double stddev) { return mean + stddev * next(); }

  /// Uniform in [0, 1), 53-bit resolution.
  double uniform01() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

private:
  /// Uniform in (0, 1]; keeps log() finite.
  double uniform_open01() {
    return (static_cast<double>(eng_() >> 11) + 1.0) * 0x1.0p-53;
  }

  std::mt19937_64 eng_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace icsbench::rng
