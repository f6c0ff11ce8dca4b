#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "spinbundle/config_space.hpp"

namespace spinbundle {

/// Seeded uniform sampler on S^2 (normalized 3D standard Gaussian draws).
class SphereSampler {
 public:
  explicit SphereSampler(std::uint64_t seed) : rng_(seed) {}

  SpherePoint next() {
    for (;;) {
      const Vec3 v(gauss_(rng_), gauss_(rng_), gauss_(rng_));
      if (v.norm() > 1e-8) return SpherePoint::normalized(v);
    }
  }

  std::vector<SpherePoint> draw(std::size_t n) {
    std::vector<SpherePoint> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(next());
    return out;
  }

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
  std::normal_distribution<double> gauss_{0.0, 1.0};
};

inline std::vector<SpherePoint> sample_sphere(std::uint64_t seed, std::size_t n) {
  return SphereSampler(seed).draw(n);
}

/// Fixed probe set used for cheap precondition checks on fields.
inline const std::vector<SpherePoint>& probe_points() {
  static const std::vector<SpherePoint> pts = sample_sphere(0x5eedULL, 64);
  return pts;
}

}  // namespace spinbundle
