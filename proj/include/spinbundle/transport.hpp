#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "spinbundle/config_space.hpp"
#include "spinbundle/line_bundle.hpp"
#include "spinbundle/types.hpp"

namespace spinbundle {

/// How a curve on S^2 closes up. Both closed classes descend to loops in RP^2.
enum class ClosureClass { open, closed_on_sphere, antipodal };

inline constexpr double kCurveFdStep = 1e-6;
inline constexpr double kProjectorFdStep = 1e-6;
inline constexpr double kEndpointTolerance = 1e-10;
inline constexpr int kMinTransportSteps = 16;
inline constexpr int kDefaultTransportSteps = 4096;

/// Parametrized curve t in [0, 1] -> S^2. Evaluators may be called slightly
/// outside [0, 1] by finite differences.
class Curve {
 public:
  using PointFn = std::function<SpherePoint(double)>;
  using VelocityFn = std::function<Vec3(double)>;

  Curve(PointFn at, std::optional<VelocityFn> velocity, ClosureClass closure)
      : at_(std::move(at)), velocity_(std::move(velocity)), closure_(closure) {}

  [[nodiscard]] SpherePoint at(double t) const { return at_(t); }

  [[nodiscard]] Vec3 velocity(double t) const {
    if (velocity_) return (*velocity_)(t);
    return (at_(t + kCurveFdStep).coords() - at_(t - kCurveFdStep).coords()) / (2.0 * kCurveFdStep);
  }

  [[nodiscard]] bool has_analytic_velocity() const { return velocity_.has_value(); }
  [[nodiscard]] ClosureClass closure() const { return closure_; }

  /// Distance of x(1) from x(0) (closed) or from -x(0) (antipodal); 0 for open curves.
  [[nodiscard]] double endpoint_residual() const {
    switch (closure_) {
      case ClosureClass::open:
        return 0.0;
      case ClosureClass::closed_on_sphere:
        return distance(at(1.0), at(0.0));
      case ClosureClass::antipodal:
        return distance(at(1.0), -at(0.0));
    }
    return 0.0;
  }

  static Curve constant(const SpherePoint& p) {
    return {[p](double) { return p; }, VelocityFn([](double) { return Vec3::Zero().eval(); }),
            ClosureClass::closed_on_sphere};
  }

  /// Arc of the great circle through `start` heading toward `toward`, sweeping
  /// `sweep` radians with angle s(t) = sweep * (t + warp * t * (1 - t)).
  /// |warp| < 1 keeps s monotone. Sweeps of pi and 2pi are antipodal and closed.
  static Curve great_circle(const SpherePoint& start, const Vec3& toward, double sweep,
                            double warp = 0.0) {
    if (!(std::abs(warp) < 1.0)) throw std::invalid_argument("great_circle: |warp| must be < 1");
    const Vec3 u = start.coords();
    Vec3 w = toward - toward.dot(u) * u;
    if (!(w.norm() > 1e-12)) throw std::invalid_argument("great_circle: direction parallel to start");
    w.normalize();
    ClosureClass closure = ClosureClass::open;
    if (std::abs(sweep - kPi) < 1e-12) closure = ClosureClass::antipodal;
    if (std::abs(sweep - 2.0 * kPi) < 1e-12) closure = ClosureClass::closed_on_sphere;
    auto s = [sweep, warp](double t) { return sweep * (t + warp * t * (1.0 - t)); };
    auto ds = [sweep, warp](double t) { return sweep * (1.0 + warp * (1.0 - 2.0 * t)); };
    return {[u, w, s](double t) {
              const double a = s(t);
              return SpherePoint::normalized(std::cos(a) * u + std::sin(a) * w);
            },
            VelocityFn([u, w, s, ds](double t) {
              const double a = s(t);
              return ((-std::sin(a) * u + std::cos(a) * w) * ds(t)).eval();
            }),
            closure};
  }

  /// Circle of angular radius `radius` around `axis`, traversed once.
  static Curve small_circle(const Vec3& axis, double radius, double phase = 0.0) {
    const Vec3 n = axis.normalized();
    Vec3 helper = std::abs(n[0]) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
    const Vec3 e1 = (helper - helper.dot(n) * n).normalized();
    const Vec3 e2 = n.cross(e1);
    const double c = std::cos(radius);
    const double s = std::sin(radius);
    return {[n, e1, e2, c, s, phase](double t) {
              const double a = 2.0 * kPi * t + phase;
              return SpherePoint::normalized(c * n + s * (std::cos(a) * e1 + std::sin(a) * e2));
            },
            VelocityFn([e1, e2, s, phase](double t) {
              const double a = 2.0 * kPi * t + phase;
              return (2.0 * kPi * s * (-std::sin(a) * e1 + std::cos(a) * e2)).eval();
            }),
            ClosureClass::closed_on_sphere};
  }

  [[nodiscard]] Curve reversed() const {
    std::optional<VelocityFn> vel;
    if (velocity_) vel = [v = *velocity_](double t) { return (-v(1.0 - t)).eval(); };
    return {[a = at_](double t) { return a(1.0 - t); }, std::move(vel), closure_};
  }

  /// Traverses `first` then `second` at double speed. Requires first(1) == second(0).
  static Curve concatenate(const Curve& first, const Curve& second) {
    if (distance(first.at(1.0), second.at(0.0)) > kEndpointTolerance) {
      throw std::invalid_argument("concatenate: curves do not meet");
    }
    auto closure_of = [](ClosureClass a, ClosureClass b) {
      if (a == ClosureClass::open || b == ClosureClass::open) return ClosureClass::open;
      return a == b ? ClosureClass::closed_on_sphere : ClosureClass::antipodal;
    };
    auto at = [first, second](double t) {
      return t < 0.5 ? first.at(2.0 * t) : second.at(2.0 * t - 1.0);
    };
    std::optional<VelocityFn> vel;
    if (first.has_analytic_velocity() && second.has_analytic_velocity()) {
      vel = [first, second](double t) {
        return (t < 0.5 ? 2.0 * first.velocity(2.0 * t) : 2.0 * second.velocity(2.0 * t - 1.0)).eval();
      };
    }
    return {at, std::move(vel), closure_of(first.closure(), second.closure())};
  }

 private:
  PointFn at_;
  std::optional<VelocityFn> velocity_;
  ClosureClass closure_;
};

/// Field of N x N projectors over S^2, optionally with its analytic directional
/// derivative dP(x)[v].
template <int N>
class ProjectorField {
 public:
  using Eval = std::function<CMat<N>(const SpherePoint&)>;
  using Derivative = std::function<CMat<N>(const SpherePoint&, const Vec3&)>;

  ProjectorField(Eval p, std::optional<Derivative> dp, bool even, std::string label = {})
      : p_(std::move(p)), dp_(std::move(dp)), even_(even), label_(std::move(label)) {}

  CMat<N> operator()(const SpherePoint& x) const { return p_(x); }

  /// dP/dt along the curve at t.
  [[nodiscard]] CMat<N> rate(const Curve& c, double t) const {
    if (dp_) return (*dp_)(c.at(t), c.velocity(t));
    return (p_(c.at(t + kProjectorFdStep)) - p_(c.at(t - kProjectorFdStep))) /
           (2.0 * kProjectorFdStep);
  }

  [[nodiscard]] bool even() const { return even_; }
  [[nodiscard]] bool has_analytic_derivative() const { return dp_.has_value(); }
  [[nodiscard]] const std::string& label() const { return label_; }

 private:
  Eval p_;
  std::optional<Derivative> dp_;
  bool even_;
  std::string label_;
};

/// Projector field of xi_- built from an odd chi. Odd-linear gets the analytic
/// derivative dP = v x^T + x v^T.
inline ProjectorField<3> minus_field(ChiVariant v = ChiVariant::odd_linear) {
  if (parity_of(v) != Parity::odd) throw ParityViolation("minus_field requires an odd chi");
  std::optional<ProjectorField<3>::Derivative> dp;
  if (v == ChiVariant::odd_linear) {
    dp = [](const SpherePoint& x, const Vec3& vel) {
      const Vec3& c = x.coords();
      return CMat3((vel * c.transpose() + c * vel.transpose()).cast<cplx>());
    };
  }
  return {[v](const SpherePoint& x) { return projector_minus(x, v); }, std::move(dp), true,
          "p-[" + std::string(to_string(v)) + "]"};
}

/// Constant projector of the trivial line bundle xi_+.
inline ProjectorField<3> plus_field() {
  return {[](const SpherePoint&) { return projector_plus(); },
          ProjectorField<3>::Derivative([](const SpherePoint&, const Vec3&) { return CMat3::Zero().eval(); }),
          true, "p+"};
}

/// Grassmann-connection parallel transport: integrates dv/dt = [P', P] v with
/// classical RK4 at `steps` fixed steps.
template <int N>
CVec<N> parallel_transport(const ProjectorField<N>& field, const Curve& curve, const CVec<N>& v0,
                           int steps = kDefaultTransportSteps) {
  if (steps < kMinTransportSteps) {
    throw std::invalid_argument("parallel_transport: need at least " +
                                std::to_string(kMinTransportSteps) + " steps");
  }
  const CMat<N> p0 = field(curve.at(0.0));
  if ((v0 - p0 * v0).norm() > tol::kFiber * std::max(1.0, v0.norm())) {
    throw NotInFiber("parallel_transport: initial vector is not in the fiber");
  }
  auto generator = [&](double t) -> CMat<N> {
    const CMat<N> p = field(curve.at(t));
    const CMat<N> dp = field.rate(curve, t);
    return dp * p - p * dp;
  };
  const double dt = 1.0 / steps;
  CVec<N> v = v0;
  CMat<N> a_start = generator(0.0);
  for (int i = 0; i < steps; ++i) {
    const double t = i * dt;
    const CMat<N> a_mid = generator(t + 0.5 * dt);
    const CMat<N> a_end = generator(t + dt);
    const CVec<N> k1 = a_start * v;
    const CVec<N> k2 = a_mid * (v + 0.5 * dt * k1);
    const CVec<N> k3 = a_mid * (v + 0.5 * dt * k2);
    const CVec<N> k4 = a_end * (v + dt * k3);
    v += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    a_start = a_end;
  }
  return v;
}

/// Unit vector spanning the image of a rank-1 projector.
template <int N>
CVec<N> fiber_frame(const CMat<N>& p) {
  Eigen::Index col = 0;
  p.colwise().norm().maxCoeff(&col);
  return p.col(col).normalized();
}

/// Holonomy scalar h with transport(v0) = h v0 around a loop in RP^2.
template <int N>
cplx holonomy(const ProjectorField<N>& field, const Curve& loop, int steps = kDefaultTransportSteps) {
  if (!field.even()) throw DomainError("holonomy: projector field must be even to descend to RP^2");
  if (loop.closure() == ClosureClass::open) throw DomainError("holonomy: curve is not a loop in RP^2");
  if (loop.endpoint_residual() > kEndpointTolerance) {
    throw DomainError("holonomy: curve endpoints violate its closure class");
  }
  const CMat<N> p0 = field(loop.at(0.0));
  if (std::abs(p0.trace() - cplx(1.0)) > 1e-10) throw NotAProjector("holonomy: field is not rank 1");
  const CVec<N> v0 = fiber_frame<N>(p0);
  const CVec<N> v1 = parallel_transport(field, loop, v0, steps);
  return v0.dot(v1);
}

/// Worst |h - 1| over a family of contractible loops.
template <int N>
double flatness_report(const ProjectorField<N>& field, std::span<const Curve> loops,
                       int steps = kDefaultTransportSteps) {
  double worst = 0.0;
  for (const auto& c : loops) {
    if (c.closure() != ClosureClass::closed_on_sphere) {
      throw DomainError("flatness_report: loops must close on the sphere");
    }
    worst = std::max(worst, std::abs(holonomy(field, c, steps) - cplx(1.0)));
  }
  return worst;
}

}  // namespace spinbundle
