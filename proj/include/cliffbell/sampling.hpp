#pragma once

#include <cstdint>
#include <random>

#include "cliffbell/ga.hpp"

namespace cliffbell {

inline constexpr std::uint64_t kDefaultSeed = 0x5eed'c11f'be11'0001ULL;

/// Sub-seed for an independent stream, derived from a master seed with a
/// splitmix64 finalizer so that per-task streams do not depend on
/// scheduling order.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Uniform directions on the unit sphere (normalized Gaussian triples).
class DirectionSampler {
 public:
  explicit DirectionSampler(std::uint64_t seed = kDefaultSeed) : engine_(seed) {}

  Direction next() {
    for (;;) {
      const Vec3 v{gauss_(engine_), gauss_(engine_), gauss_(engine_)};
      if (dot(v, v) > 1e-12) return Direction::normalized(v);
    }
  }

  /// Uniform in [-1, 1].
  double coefficient() { return uniform_(engine_); }

  /// Multivector with every coefficient uniform in [-1, 1].
  Multivector multivector() {
    Multivector m;
    for (std::size_t i = 0; i < kBladeCount; ++i) m[i] = coefficient();
    return m;
  }

  bool coin() { return (engine_() & 1U) != 0; }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> gauss_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{-1.0, 1.0};
};

}  // namespace cliffbell
