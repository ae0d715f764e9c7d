#pragma once

#include <cstdint>
#include <random>

namespace stba {

/// Seedable, splittable generator: mt19937_64 seeded through splitmix64.
/// Standard normals come from the Box-Muller transform on 53-bit uniforms,
/// consuming two uniforms per pair of normals, so streams are identical on
/// every platform for a given seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  /// Independent child stream keyed by `stream`; does not advance *this.
  Rng split(std::uint64_t stream) const;

  /// Uniform in the open interval (0, 1).
  double uniform();
  double normal();

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace stba
