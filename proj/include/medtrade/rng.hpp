#pragma once

#include <cstdint>

namespace medtrade {

/// Counter-based pseudo-random stream (splitmix64 core).
///
/// Seeding with (seed, stream) derives an independent stream per counter
/// value, so a simulation keyed by (seed, run index) produces the same draws
/// whether runs execute serially or partitioned across workers.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(mix(seed + kGamma)) {}

  Rng(std::uint64_t seed, std::uint64_t stream)
      : state_(mix(mix(seed + kGamma) + stream * kGamma + 1)) {}

  std::uint64_t next_u64() {
    state_ += kGamma;
    return mix(state_);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace medtrade
