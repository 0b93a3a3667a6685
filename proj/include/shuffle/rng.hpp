#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace shuffle {

// Seedable, splittable 64-bit generator (splitmix64 core). One instance
// drives one chain or replicate; derive independent substreams with split().
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next_u64() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform on [0, 1) with 53-bit resolution.
  double next_double() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Standard exponential draw via inverse CDF, -log(1-U). Always finite.
  double next_exponential() noexcept { return -std::log1p(-next_double()); }

  /// Uniform on {0, ..., n-1}.
  std::uint64_t next_below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("SplitMix64::next_below: n must be positive");
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  /// Derived stream; distinct keys yield distinct, non-overlapping-in-practice
  /// streams regardless of how much the parent has been advanced.
  SplitMix64 split(std::uint64_t key) const noexcept {
    return SplitMix64(mix(state_ ^ mix(key + 0x632BE59BD9B4E019ULL)));
  }

 private:
  static std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

/// Deterministic independent stream for replicate `replicate` of a run
/// seeded with `seed`.
inline SplitMix64 rng_stream(std::uint64_t seed, std::uint64_t replicate) {
  return SplitMix64(seed).split(replicate);
}

}  // namespace shuffle
