#pragma once

// Counter-based pseudo-random generator built on splitmix64.
// Stream splitting: child stream k of a generator seeded with s uses
// seed hash(s, k); the discipline is recorded in output metadata so
// simulations are reproducible across platforms.

#include <cmath>
#include <cstdint>
#include <numbers>

namespace wgqed {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class CounterRng {
public:
  explicit CounterRng(std::uint64_t seed) : key_(splitmix64(seed)) {}

  static constexpr const char *algorithm() { return "splitmix64-counter"; }

  CounterRng split(std::uint64_t stream) const {
    return CounterRng(splitmix64(key_ ^ (0xd1b54a32d192ed03ULL * (stream + 1))));
  }

  std::uint64_t next_u64() { return splitmix64(key_ ^ counter_++); }

  // uniform in (0, 1]
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    cached_ = r * std::sin(theta);
    have_cached_ = true;
    return r * std::cos(theta);
  }

  double exponential(double rate) { return -std::log(uniform()) / rate; }

private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

} // namespace wgqed
