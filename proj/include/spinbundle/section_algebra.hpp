#pragma once

#include <algorithm>
#include <array>
#include <functional>
#include <span>
#include <string>
#include <utility>

#include "spinbundle/config_space.hpp"
#include "spinbundle/line_bundle.hpp"
#include "spinbundle/polynomial.hpp"
#include "spinbundle/sampling.hpp"

namespace spinbundle {

/// Complex function on S^2 with an optional declared parity under x -> -x.
class ScalarField {
 public:
  using Evaluator = std::function<cplx(const SpherePoint&)>;

  ScalarField() : ScalarField(zero()) {}

  ScalarField(Evaluator f, Parity declared, std::string label = {})
      : f_(std::move(f)), parity_(declared), label_(std::move(label)) {}

  static ScalarField zero() {
    return {[](const SpherePoint&) { return cplx(0.0); }, Parity::even, "0"};
  }

  static ScalarField constant(cplx c) {
    return {[c](const SpherePoint&) { return c; }, Parity::even, "const"};
  }

  static ScalarField from_polynomial(Polynomial p) {
    const Parity par = p.parity();
    std::string label = p.to_string();
    return {[p = std::move(p)](const SpherePoint& x) { return cplx(p(x.coords()), 0.0); }, par,
            std::move(label)};
  }

  cplx operator()(const SpherePoint& x) const { return f_(x); }

  [[nodiscard]] Parity declared_parity() const { return parity_; }
  [[nodiscard]] const std::string& label() const { return label_; }

  /// Same values, different declared parity (used by the isotypic projectors).
  [[nodiscard]] ScalarField with_parity(Parity p) const { return {f_, p, label_}; }

  friend ScalarField operator+(const ScalarField& a, const ScalarField& b) {
    const Parity p = a.parity_ == b.parity_ ? a.parity_ : Parity::none;
    return {[fa = a.f_, fb = b.f_](const SpherePoint& x) { return fa(x) + fb(x); }, p,
            "(" + a.label_ + ")+(" + b.label_ + ")"};
  }

  friend ScalarField operator*(cplx s, const ScalarField& a) {
    return {[s, fa = a.f_](const SpherePoint& x) { return s * fa(x); }, a.parity_, a.label_};
  }

 private:
  Evaluator f_;
  Parity parity_ = Parity::none;
  std::string label_;
};

/// sup over samples of |a(x) - a(-x)| (even) or |a(x) + a(-x)| (odd).
inline double parity_residual(const ScalarField& a, Parity p, std::span<const SpherePoint> xs) {
  if (p == Parity::none) return 0.0;
  const double s = p == Parity::even ? -1.0 : 1.0;
  double r = 0.0;
  for (const auto& x : xs) r = std::max(r, std::abs(a(x) + s * a(-x)));
  return r;
}

/// Throws ParityViolation unless `a` has parity `p`: by declaration, or, for
/// undeclared fields, on the probe set.
inline void require_parity(const ScalarField& a, Parity p, std::string_view who) {
  if (a.declared_parity() == p) return;
  if (a.declared_parity() == Parity::none &&
      parity_residual(a, p, probe_points()) <= tol::kFunctional) {
    return;
  }
  throw ParityViolation(std::string(who) + ": field is not " + std::string(to_string(p)));
}

/// Z2 isotypic decomposition a = a_+ + a_-.
inline std::pair<ScalarField, ScalarField> parity_decompose(const ScalarField& a) {
  ScalarField even({[a](const SpherePoint& x) { return 0.5 * (a(x) + a(-x)); }}, Parity::even,
                   a.label() + "|even");
  ScalarField odd({[a](const SpherePoint& x) { return 0.5 * (a(x) - a(-x)); }}, Parity::odd,
                  a.label() + "|odd");
  return {std::move(even), std::move(odd)};
}

// ---------------------------------------------------------------------------
// Sections of xi_- as elements of p_-(A^3).

/// s = sum_a f_a s_a with even coefficient fields f_a.
class SectionXi {
 public:
  SectionXi() : f_{ScalarField::zero(), ScalarField::zero(), ScalarField::zero()} {}
  explicit SectionXi(std::array<ScalarField, 3> f) : f_(std::move(f)) {}

  [[nodiscard]] const ScalarField& coefficient(Chart alpha) const { return f_[index_of(alpha) - 1]; }
  [[nodiscard]] const std::array<ScalarField, 3>& coefficients() const { return f_; }

  [[nodiscard]] CVec3 coefficient_values(const SpherePoint& x) const {
    return CVec3(f_[0](x), f_[1](x), f_[2](x));
  }

  /// e([x]) = sum_a f_a(x) e_a([x]) in the ambient C^3.
  [[nodiscard]] FiberVector value(const SpherePoint& x) const {
    const ProjectivePoint q = project(x);
    FiberVector e = FiberVector::Zero();
    for (Chart a : kCharts) e += coefficient(a)(x) * generator_e(a, q);
    return e;
  }

 private:
  std::array<ScalarField, 3> f_;
};

/// sup over samples and beta of |(p_- f)_beta - f_beta|.
inline double projector_fixed_residual(const SectionXi& s, std::span<const SpherePoint> xs) {
  double r = 0.0;
  for (const auto& x : xs) {
    const CVec3 f = s.coefficient_values(x);
    const CVec3 pf = projector_minus(x) * f;
    r = std::max(r, (pf - f).cwiseAbs().maxCoeff());
  }
  return r;
}

/// sup over samples of the largest parity violation among the three coefficients.
inline double coefficient_parity_residual(const SectionXi& s, std::span<const SpherePoint> xs) {
  double r = 0.0;
  for (const auto& f : s.coefficients()) r = std::max(r, parity_residual(f, Parity::even, xs));
  return r;
}

/// f_a(x) = x_a a(x) for an odd field a.
inline SectionXi section_from_odd(const ScalarField& a) {
  require_parity(a, Parity::odd, "section_from_odd");
  std::array<ScalarField, 3> f;
  for (Chart c : kCharts) {
    const int i = index_of(c);
    f[i - 1] = ScalarField([a, i](const SpherePoint& x) { return x.coord(i) * a(x); }, Parity::even,
                           "x" + std::to_string(i) + "*(" + a.label() + ")");
  }
  return SectionXi(std::move(f));
}

/// Builds f_a = x_a a without checking parity of a. The result lies in
/// p_-(A^3) only when a is odd.
inline SectionXi section_from_coefficient_unchecked(const ScalarField& a) {
  std::array<ScalarField, 3> f;
  for (Chart c : kCharts) {
    const int i = index_of(c);
    f[i - 1] = ScalarField([a, i](const SpherePoint& x) { return x.coord(i) * a(x); }, Parity::none,
                           "x" + std::to_string(i) + "*(" + a.label() + ")");
  }
  return SectionXi(std::move(f));
}

/// a(x) = sum_a x_a f_a(x). Requires p_- f = f on the probe set.
inline ScalarField odd_from_section(const SectionXi& s) {
  if (projector_fixed_residual(s, probe_points()) > tol::kFunctional) {
    throw DomainError("odd_from_section: coefficients are not fixed by p_-");
  }
  return {[s](const SpherePoint& x) {
            return x.x1() * s.coefficient(Chart::one)(x) + x.x2() * s.coefficient(Chart::two)(x) +
                   x.x3() * s.coefficient(Chart::three)(x);
          },
          Parity::odd, "sum x_a f_a"};
}

/// Projects an arbitrary coefficient triple into p_-(A^3): f -> p_- f.
inline SectionXi project_minus(const SectionXi& g) {
  std::array<ScalarField, 3> f;
  for (Chart c : kCharts) {
    const int i = index_of(c);
    f[i - 1] = ScalarField(
        [g, i](const SpherePoint& x) {
          const CVec3 v = g.coefficient_values(x);
          return x.coord(i) * (x.x1() * v[0] + x.x2() * v[1] + x.x3() * v[2]);
        },
        Parity::none, "p-(" + std::to_string(i) + ")");
  }
  return SectionXi(std::move(f));
}

// ---------------------------------------------------------------------------
// Sections of the pull-back bundle over S^2.

/// sigma(x) = (x, a(x) chi(x)).
class PullbackSection {
 public:
  PullbackSection(ScalarField coefficient, ChiVariant chi_map)
      : a_(std::move(coefficient)), chi_(chi_map) {}

  [[nodiscard]] const ScalarField& coefficient() const { return a_; }
  [[nodiscard]] ChiVariant chi_variant() const { return chi_; }

  [[nodiscard]] FiberVector fiber_value(const SpherePoint& x) const { return a_(x) * chi(chi_, x); }

  FiberPoint operator()(const SpherePoint& x) const { return {x, fiber_value(x)}; }

 private:
  ScalarField a_;
  ChiVariant chi_;
};

/// T(s) = sum_a f_a q*s_a, i.e. x -> (x, a(x) chi(x)) with a = sum_a x_a f_a.
inline PullbackSection pullback_T(const SectionXi& s, ChiVariant odd_chi = ChiVariant::odd_linear) {
  if (parity_of(odd_chi) != Parity::odd) {
    throw ParityViolation("pullback_T: the pull-back q*xi_- is presented with an odd chi");
  }
  return {odd_from_section(s), odd_chi};
}

/// (g sigma)(x) = act(g, sigma(g^{-1} x)).
inline PullbackSection g_action_on_section(const PullbackSection& sigma, GroupElement g,
                                           const GroupAction& action) {
  if (const auto b = action.binding(); b && *b != sigma.chi_variant()) {
    throw BindingMismatch("g_action_on_section: action " + action.label() +
                          " is bound to a different chi than the section");
  }
  const ChiVariant cv = sigma.chi_variant();
  ScalarField moved(
      [sigma, g, action, cv](const SpherePoint& x) {
        const FiberPoint image = action(g, sigma(act(g.inverse(), x)));
        return fiber_coefficient(cv, x, image.v);
      },
      Parity::none, "g." + sigma.coefficient().label());
  return {std::move(moved), cv};
}

/// sup over samples of ||(g sigma)(x) - sigma(x)|| for g = -1.
inline double invariance_residual(const PullbackSection& sigma, const GroupAction& action,
                                  std::span<const SpherePoint> xs) {
  const PullbackSection moved = g_action_on_section(sigma, GroupElement::exchange(), action);
  double r = 0.0;
  for (const auto& x : xs) r = std::max(r, (moved.fiber_value(x) - sigma.fiber_value(x)).norm());
  return r;
}

struct SinglevaluednessResiduals {
  double same_value = 0.0;      // sup ||v(-x) - v(x)||
  double opposite_value = 0.0;  // sup ||v(-x) + v(x)||
};

inline SinglevaluednessResiduals singlevaluedness_residuals(const PullbackSection& sigma,
                                                            std::span<const SpherePoint> xs) {
  SinglevaluednessResiduals r;
  for (const auto& x : xs) {
    const FiberVector v = sigma.fiber_value(x);
    const FiberVector w = sigma.fiber_value(-x);
    r.same_value = std::max(r.same_value, (w - v).norm());
    r.opposite_value = std::max(r.opposite_value, (w + v).norm());
  }
  return r;
}

inline double sup_norm(const PullbackSection& sigma, std::span<const SpherePoint> xs) {
  double r = 0.0;
  for (const auto& x : xs) r = std::max(r, sigma.fiber_value(x).norm());
  return r;
}

}  // namespace spinbundle
