#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "spinbundle/types.hpp"

namespace spinbundle {

/// Polar angle theta in [0, pi] measured from +e3, azimuth phi in [0, 2pi)
/// measured from +e1. At the poles phi is pinned to 0.
struct Angles {
  double theta = 0.0;
  double phi = 0.0;

  /// Antipodal map in angle form: (theta, phi) -> (pi - theta, phi + pi).
  [[nodiscard]] Angles antipode() const;
};

inline double wrap_azimuth(double phi) {
  double w = std::fmod(phi, 2.0 * kPi);
  if (w < 0.0) w += 2.0 * kPi;
  if (w >= 2.0 * kPi) w = 0.0;
  return w;
}

inline Angles Angles::antipode() const { return {kPi - theta, wrap_azimuth(phi + kPi)}; }

/// A point of the two-sphere, the relative-position space of two particles.
class SpherePoint {
 public:
  SpherePoint() : x_(0.0, 0.0, 1.0) {}

  /// Requires a unit vector (to 1e-12).
  static SpherePoint from_cartesian(double x1, double x2, double x3) {
    const Vec3 v(x1, x2, x3);
    if (!(std::abs(v.norm() - 1.0) <= tol::kUnit)) {
      throw std::invalid_argument("SpherePoint: coordinates are not on the unit sphere");
    }
    return SpherePoint(v);
  }

  /// Normalizes any nonzero vector onto the sphere.
  static SpherePoint normalized(const Vec3& v) {
    const double n = v.norm();
    if (!(n > 0.0) || !std::isfinite(n)) {
      throw std::invalid_argument("SpherePoint: cannot normalize a zero or non-finite vector");
    }
    return SpherePoint(v / n);
  }

  static SpherePoint from_angles(double theta, double phi) {
    const double s = std::sin(theta);
    return SpherePoint(Vec3(s * std::cos(phi), s * std::sin(phi), std::cos(theta)));
  }

  static SpherePoint from_angles(const Angles& a) { return from_angles(a.theta, a.phi); }

  [[nodiscard]] const Vec3& coords() const { return x_; }
  [[nodiscard]] double x1() const { return x_[0]; }
  [[nodiscard]] double x2() const { return x_[1]; }
  [[nodiscard]] double x3() const { return x_[2]; }

  /// 1-based coordinate access, matching chart indices.
  [[nodiscard]] double coord(int alpha) const { return x_[alpha - 1]; }

  [[nodiscard]] double theta() const { return std::atan2(std::hypot(x_[0], x_[1]), x_[2]); }

  [[nodiscard]] double phi() const {
    if (std::hypot(x_[0], x_[1]) <= tol::kZero) return 0.0;
    return wrap_azimuth(std::atan2(x_[1], x_[0]));
  }

  [[nodiscard]] Angles angles() const { return {theta(), phi()}; }

  SpherePoint operator-() const { return SpherePoint(-x_); }

  friend bool operator==(const SpherePoint& a, const SpherePoint& b) { return a.x_ == b.x_; }

 private:
  explicit SpherePoint(const Vec3& v) : x_(v) {}
  Vec3 x_;
};

inline double distance(const SpherePoint& a, const SpherePoint& b) {
  return (a.coords() - b.coords()).norm();
}

/// The exchange group Z2 = {+1, -1}.
class GroupElement {
 public:
  constexpr GroupElement() = default;

  static constexpr GroupElement identity() { return GroupElement(1); }
  static constexpr GroupElement exchange() { return GroupElement(-1); }

  static GroupElement from_sign(int s) {
    if (s != 1 && s != -1) throw std::invalid_argument("GroupElement: sign must be +1 or -1");
    return GroupElement(s);
  }

  [[nodiscard]] constexpr int sign() const { return sign_; }
  [[nodiscard]] constexpr GroupElement inverse() const { return *this; }

  friend constexpr GroupElement operator*(GroupElement a, GroupElement b) {
    return GroupElement(a.sign_ * b.sign_);
  }
  friend constexpr bool operator==(GroupElement, GroupElement) = default;

 private:
  constexpr explicit GroupElement(int s) : sign_(s) {}
  int sign_ = 1;
};

inline constexpr std::array<GroupElement, 2> kGroupElements{GroupElement::identity(),
                                                            GroupElement::exchange()};

/// Base action: rho_{+1} = id, rho_{-1} = antipode.
inline SpherePoint antipode(const SpherePoint& p) { return -p; }

inline SpherePoint act(GroupElement g, const SpherePoint& p) { return g.sign() < 0 ? -p : p; }

/// A point of RP^2 = S^2 / Z2, stored by a canonical representative whose first
/// coordinate with |x| > 1e-12 is positive.
class ProjectivePoint {
 public:
  explicit ProjectivePoint(const SpherePoint& p) : rep_(canonicalize(p)) {}

  [[nodiscard]] const SpherePoint& rep() const { return rep_; }
  [[nodiscard]] double coord(int alpha) const { return rep_.coord(alpha); }

  friend bool operator==(const ProjectivePoint& a, const ProjectivePoint& b) {
    return a.rep_ == b.rep_;
  }

 private:
  static SpherePoint canonicalize(const SpherePoint& p) {
    for (int i = 1; i <= 3; ++i) {
      const double c = p.coord(i);
      if (std::abs(c) > tol::kZero) return c > 0.0 ? p : -p;
    }
    return p;
  }

  SpherePoint rep_;
};

inline ProjectivePoint project(const SpherePoint& p) { return ProjectivePoint(p); }

// ---------------------------------------------------------------------------
// Chart atlas U_alpha = {[x] : x_alpha != 0}.

enum class Chart : int { one = 1, two = 2, three = 3 };

inline constexpr std::array<Chart, 3> kCharts{Chart::one, Chart::two, Chart::three};

constexpr int index_of(Chart c) { return static_cast<int>(c); }

inline Chart chart_from_index(int alpha) {
  if (alpha < 1 || alpha > 3) throw std::out_of_range("chart index must be 1, 2 or 3");
  return static_cast<Chart>(alpha);
}

/// The two coordinate indices other than alpha, ascending.
constexpr std::array<int, 2> complementary_indices(Chart c) {
  switch (c) {
    case Chart::one:
      return {2, 3};
    case Chart::two:
      return {1, 3};
    case Chart::three:
      return {1, 2};
  }
  return {0, 0};
}

inline bool in_chart(Chart c, const ProjectivePoint& q) {
  return std::abs(q.coord(index_of(c))) > tol::kZero;
}

inline Vec2 chart_map(Chart c, const ProjectivePoint& q) {
  const double xa = q.coord(index_of(c));
  if (!(std::abs(xa) > tol::kZero)) {
    throw OutsideChart("chart_map: point lies outside chart U_" + std::to_string(index_of(c)));
  }
  const auto [i, j] = complementary_indices(c);
  return {q.coord(i) / xa, q.coord(j) / xa};
}

/// Inverse chart map: rebuilds [x] with x_alpha = 1 and the remaining
/// coordinates (u, v), then normalizes.
inline ProjectivePoint chart_inverse(Chart c, const Vec2& uv) {
  Vec3 v;
  v[index_of(c) - 1] = 1.0;
  const auto [i, j] = complementary_indices(c);
  v[i - 1] = uv[0];
  v[j - 1] = uv[1];
  return project(SpherePoint::normalized(v));
}

/// phi_alpha([x]) = |x_alpha| inside U_alpha and 0 outside; sum of squares is 1.
inline double partition_phi(Chart c, const ProjectivePoint& q) {
  return in_chart(c, q) ? std::abs(q.coord(index_of(c))) : 0.0;
}

}  // namespace spinbundle
