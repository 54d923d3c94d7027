#pragma once

#include <cstdint>
#include <initializer_list>
#include <optional>

namespace credit_transfer {

/// SplitMix64. Every random draw in the library goes through this generator;
/// <random> distributions are not used (their algorithms are
/// implementation-defined).
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

  /// Uniform integer in [0, bound) by rejection; bound must be positive.
  std::uint64_t below(std::uint64_t bound);

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Standard normal via the Box-Muller transform (pairs are cached).
  double normal();

  /// The SplitMix64 output finalizer.
  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
  std::optional<double> spare_;
};

/// Seed of an independent stream keyed by (seed, keys...):
/// h = mix(seed); for each key k: h = mix(h ^ mix(k + golden)).
std::uint64_t derive_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> keys);

}  // namespace credit_transfer
