#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <string_view>

#include "spinbundle/config_space.hpp"
#include "spinbundle/types.hpp"

namespace spinbundle {

enum class Parity { even, odd, none };

inline std::string_view to_string(Parity p) {
  switch (p) {
    case Parity::even:
      return "even";
    case Parity::odd:
      return "odd";
    case Parity::none:
      return "none";
  }
  return "?";
}

/// Normalized, nowhere-vanishing maps S^2 -> C^3 that present a line bundle as a
/// sub-bundle of the trivial C^3 bundle.
enum class ChiVariant { odd_linear, odd_harmonic, even_constant };

inline constexpr Parity parity_of(ChiVariant v) {
  return v == ChiVariant::even_constant ? Parity::even : Parity::odd;
}

inline std::string_view to_string(ChiVariant v) {
  switch (v) {
    case ChiVariant::odd_linear:
      return "odd-linear";
    case ChiVariant::odd_harmonic:
      return "odd-harmonic";
    case ChiVariant::even_constant:
      return "even-constant";
  }
  return "?";
}

inline std::optional<ChiVariant> chi_variant_from_string(std::string_view s) {
  if (s == "odd-linear") return ChiVariant::odd_linear;
  if (s == "odd-harmonic") return ChiVariant::odd_harmonic;
  if (s == "even-constant") return ChiVariant::even_constant;
  return std::nullopt;
}

/// odd-linear:   chi(x) = x
/// odd-harmonic: chi(x) = (e^{-i phi} sin(theta)/sqrt2, -cos(theta), -e^{i phi} sin(theta)/sqrt2),
///               evaluated through e^{+-i phi} sin(theta) = x1 +- i x2 so it is smooth at the poles.
/// even-constant: chi(x) = e1.
inline FiberVector chi(ChiVariant v, const SpherePoint& p) {
  constexpr double r2 = 0.70710678118654752440;
  switch (v) {
    case ChiVariant::odd_linear:
      return p.coords().cast<cplx>();
    case ChiVariant::odd_harmonic:
      return FiberVector(cplx(p.x1(), -p.x2()) * r2, cplx(-p.x3(), 0.0),
                         -cplx(p.x1(), p.x2()) * r2);
    case ChiVariant::even_constant:
      return FiberVector(1.0, 0.0, 0.0);
  }
  return FiberVector::Zero();
}

// ---------------------------------------------------------------------------
// Projectors

template <int N>
struct ProjectorResiduals {
  double idempotency = 0.0;  // ||P^2 - P||_F
  double hermiticity = 0.0;  // ||P - P^dagger||_F
  double trace = 0.0;        // |tr P - rank|
};

template <int N>
ProjectorResiduals<N> projector_residuals(const CMat<N>& p, int rank = 1) {
  return {(p * p - p).norm(), (p - p.adjoint()).norm(),
          std::abs(p.trace() - cplx(static_cast<double>(rank), 0.0))};
}

template <int N>
CMat<N> rank_one_projector(const CVec<N>& v) {
  return v * v.adjoint() / v.squaredNorm();
}

/// p_-(x) = |chi(x)><chi(x)| for an odd chi; for odd-linear the entries are x_a x_b.
inline CMat3 projector_minus(const SpherePoint& x, ChiVariant v = ChiVariant::odd_linear) {
  if (parity_of(v) != Parity::odd) {
    throw ParityViolation("projector_minus requires an odd chi map");
  }
  if (v == ChiVariant::odd_linear) {
    const Vec3& c = x.coords();
    return (c * c.transpose()).cast<cplx>();
  }
  const FiberVector c = chi(v, x);
  return c * c.adjoint();
}

/// Constant rank-1 projector onto e1: the trivial line bundle.
inline CMat3 projector_plus() {
  CMat3 p = CMat3::Zero();
  p(0, 0) = 1.0;
  return p;
}

// ---------------------------------------------------------------------------
// Transition functions and local trivializations of xi_-.

inline int transition(Chart beta, Chart alpha, const ProjectivePoint& q) {
  if (!in_chart(alpha, q) || !in_chart(beta, q)) {
    throw OutsideChart("transition: point is not in U_" + std::to_string(index_of(alpha)) +
                       " ∩ U_" + std::to_string(index_of(beta)));
  }
  return q.coord(index_of(alpha)) * q.coord(index_of(beta)) > 0.0 ? 1 : -1;
}

/// Coefficient lambda with z = lambda * chi(x). Throws NotInFiber when z is off the line.
inline cplx fiber_coefficient(ChiVariant v, const SpherePoint& x, const FiberVector& z) {
  const FiberVector c = chi(v, x);
  const cplx lambda = c.dot(z);  // conjugates c
  const double off = (z - lambda * c).norm();
  if (!(off <= tol::kFiber * z.norm())) {
    throw NotInFiber("vector does not lie in the fiber line spanned by chi(x)");
  }
  return lambda;
}

/// v = sign(x_alpha) * lambda, with lambda extracted against chi at the canonical representative.
inline cplx local_trivialization(Chart alpha, const ProjectivePoint& q, const FiberVector& z,
                                 ChiVariant v = ChiVariant::odd_linear) {
  if (!in_chart(alpha, q)) {
    throw OutsideChart("local_trivialization: point outside U_" + std::to_string(index_of(alpha)));
  }
  const cplx lambda = fiber_coefficient(v, q.rep(), z);
  return q.coord(index_of(alpha)) > 0.0 ? lambda : -lambda;
}

inline FiberVector local_trivialization_inverse(Chart alpha, const ProjectivePoint& q, cplx value,
                                                ChiVariant v = ChiVariant::odd_linear) {
  if (!in_chart(alpha, q)) {
    throw OutsideChart("local_trivialization_inverse: point outside U_" +
                       std::to_string(index_of(alpha)));
  }
  const double s = q.coord(index_of(alpha)) > 0.0 ? 1.0 : -1.0;
  return s * value * chi(v, q.rep());
}

/// e_alpha([x]) = x_alpha * x, the generating sections of Gamma(xi_-).
inline FiberVector generator_e(Chart alpha, const ProjectivePoint& q) {
  const Vec3& x = q.rep().coords();
  return (q.coord(index_of(alpha)) * x).cast<cplx>();
}

// ---------------------------------------------------------------------------
// Z2 actions on the trivial C^3 bundle over S^2.

struct FiberPoint {
  SpherePoint base;
  FiberVector v;
};

enum class ActionKind { tau_plus, tau_minus, tau_tilde, tau_prime };

class GroupAction {
 public:
  static GroupAction tau_plus() { return GroupAction(ActionKind::tau_plus, std::nullopt); }
  static GroupAction tau_minus() { return GroupAction(ActionKind::tau_minus, std::nullopt); }

  /// Action induced on the pull-back q*xi_-, presented with an odd chi.
  static GroupAction tau_tilde(ChiVariant odd = ChiVariant::odd_linear) {
    if (parity_of(odd) != Parity::odd) throw ParityViolation("tau_tilde needs an odd chi");
    return GroupAction(ActionKind::tau_tilde, odd);
  }

  /// Sign action on the bundle presented with an even chi'.
  static GroupAction tau_prime(ChiVariant even = ChiVariant::even_constant) {
    if (parity_of(even) != Parity::even) throw ParityViolation("tau_prime needs an even chi");
    return GroupAction(ActionKind::tau_prime, even);
  }

  [[nodiscard]] ActionKind kind() const { return kind_; }
  [[nodiscard]] std::optional<ChiVariant> binding() const { return binding_; }

  [[nodiscard]] std::string label() const {
    switch (kind_) {
      case ActionKind::tau_plus:
        return "tau+";
      case ActionKind::tau_minus:
        return "tau-";
      case ActionKind::tau_tilde:
        return "tau~[" + std::string(to_string(*binding_)) + "]";
      case ActionKind::tau_prime:
        return "tau'[" + std::string(to_string(*binding_)) + "]";
    }
    return "?";
  }

  [[nodiscard]] FiberPoint operator()(GroupElement g, const FiberPoint& z) const {
    const SpherePoint gx = act(g, z.base);
    switch (kind_) {
      case ActionKind::tau_plus:
        return {gx, z.v};
      case ActionKind::tau_minus:
        return {gx, static_cast<double>(g.sign()) * z.v};
      case ActionKind::tau_tilde:
        // The ambient vector is carried along unchanged; only membership is checked.
        (void)fiber_coefficient(*binding_, z.base, z.v);
        return {gx, z.v};
      case ActionKind::tau_prime: {
        const cplx lambda = fiber_coefficient(*binding_, z.base, z.v);
        return {gx, static_cast<double>(g.sign()) * lambda * chi(*binding_, gx)};
      }
    }
    return z;
  }

 private:
  GroupAction(ActionKind k, std::optional<ChiVariant> b) : kind_(k), binding_(b) {}
  ActionKind kind_;
  std::optional<ChiVariant> binding_;
};

inline FiberPoint group_act(const GroupAction& action, GroupElement g, const FiberPoint& z) {
  return action(g, z);
}

}  // namespace spinbundle
