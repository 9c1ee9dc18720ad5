#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace roughns {

// All randomness in the toolkit flows from one 64-bit seed. Independent
// streams are derived with a SplitMix64 counter construction, so replica i
// of purpose p always sees the same stream regardless of thread schedule.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t split_seed(std::uint64_t seed, std::uint64_t purpose, std::uint64_t index = 0) {
  return splitmix64(splitmix64(splitmix64(seed) ^ purpose) ^ index);
}

// Deterministic Gaussian stream: mt19937_64 (fully specified by the standard)
// plus an explicit Box-Muller transform, avoiding the implementation-defined
// std::normal_distribution.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}

  double uniform01() {
    // in (0, 1], 53-bit resolution
    return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace roughns
