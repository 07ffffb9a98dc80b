#pragma once

#include <cstdint>
#include <limits>

namespace centralk {

/// Counter-based deterministic generator (splitmix64, v1).
///
/// Output i of a stream is a pure function of (seed, stream, i), so runs are
/// reproducible and independent streams can be carved out of one seed by
/// giving each purpose its own stream id (graph generation, per-place probe
/// draws, ...).
class CounterRng {
 public:
  CounterRng() : CounterRng(0, 0) {}

  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : state_(mix(mix(seed + kGamma) ^ mix(stream + 0x1d8e4e27c47d124fULL))) {}

  std::uint64_t next() {
    state_ += kGamma;
    return mix(state_);
  }

  /// Uniform in [0, bound), bound > 0. Lemire multiply-shift with rejection,
  /// so the distribution is exact.
  std::uint64_t uniform_below(std::uint64_t bound) {
    unsigned __int128 m = static_cast<unsigned __int128>(next()) * bound;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (lo < threshold) {
        m = static_cast<unsigned __int128>(next()) * bound;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  /// Uniform in [0, max], inclusive.
  std::uint64_t uniform_inclusive(std::uint64_t max) {
    if (max == std::numeric_limits<std::uint64_t>::max()) return next();
    return uniform_below(max + 1);
  }

  /// Uniform in [0, 1) with 53 bits of precision.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

// Stream ids used across the project. Anything new gets its own constant so
// draws never alias between purposes.
inline constexpr std::uint64_t kStreamGraph = 1;
inline constexpr std::uint64_t kStreamPlaceBase = 0x100;
inline constexpr std::uint64_t kStreamStress = 2;
inline constexpr std::uint64_t kStreamJitter = 3;

}  // namespace centralk
