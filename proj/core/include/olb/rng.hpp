#pragma once

#include <cstdint>
#include <random>

namespace olb {

/// Seedable, splittable generator. Each (seed, stream) pair maps to an
/// independent mt19937_64 seeded through SplitMix64, so Monte Carlo trial i
/// always sees the same numbers regardless of scheduling.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  static std::uint64_t splitmix64(std::uint64_t x) noexcept;

  Rng split(std::uint64_t stream) const { return Rng(seed_, mix(stream_, stream)); }

  std::uint64_t next() { return engine_(); }
  std::uint8_t bit() { return static_cast<std::uint8_t>(engine_() >> 63); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  /// Uniform integer in [0, n), n > 0, by rejection.
  std::uint64_t below(std::uint64_t n);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

 private:
  static std::uint64_t mix(std::uint64_t a, std::uint64_t b) noexcept;

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
};

}  // namespace olb
