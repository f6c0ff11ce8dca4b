#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "spinbundle/config_space.hpp"
#include "spinbundle/section_algebra.hpp"
#include "spinbundle/transport.hpp"
#include "spinbundle/types.hpp"

// Two spin-1/2 particles in the 10-dimensional Schwinger space V. Vectors are
// stored in the raw basis e1..e10 (indices 0..9):
//   e1 = |++>, e2 = |-->, e3 = |+->, e4 = |-+>, e5..e10 the remaining
//   two-boson states. V splits into three exchange triplets
//   V_m = span(|m>^(-1), |m>^(0), |m>^(+1)) and the singlet.

namespace spinbundle {

inline constexpr double kInvSqrt2 = 0.70710678118654752440;

/// |m>^(k) for m, k in {-1, 0, +1}, in raw coordinates.
inline CVec10 scheme_vector(int m, int k) {
  if (m < -1 || m > 1 || k < -1 || k > 1) throw std::invalid_argument("scheme_vector: m, k must be in {-1,0,1}");
  // Raw indices (0-based) of |m>^(k); the (m=0, k=0) entry is the symmetric
  // combination of e3 and e4 and is handled separately.
  static constexpr int table[3][3] = {
      {7, 1, 9},   // m = -1: e8, e2, e10
      {4, -1, 5},  // m =  0: e5, (e3+e4)/sqrt2, e6
      {6, 0, 8},   // m = +1: e7, e1, e9
  };
  CVec10 v = CVec10::Zero();
  const int idx = table[m + 1][k + 1];
  if (idx >= 0) {
    v[idx] = 1.0;
  } else {
    v[2] = kInvSqrt2;
    v[3] = kInvSqrt2;
  }
  return v;
}

/// |00> = (e3 - e4)/sqrt2.
inline CVec10 singlet_vector() {
  CVec10 v = CVec10::Zero();
  v[2] = kInvSqrt2;
  v[3] = -kInvSqrt2;
  return v;
}

/// Position of |m>^(k) in the block ordering V_{-1}, V_0, V_{+1}, singlet;
/// inside each block k runs -1, 0, +1.
constexpr int scheme_index(int m, int k) { return 3 * (m + 1) + (k + 1); }
inline constexpr int kSingletIndex = 9;

/// Columns are the scheme basis vectors in raw coordinates.
inline CMat10 scheme_basis() {
  CMat10 s;
  for (int m = -1; m <= 1; ++m) {
    for (int k = -1; k <= 1; ++k) s.col(scheme_index(m, k)) = scheme_vector(m, k);
  }
  s.col(kSingletIndex) = singlet_vector();
  return s;
}

/// Exchange rotation restricted to one triplet V_m, in the basis (k = -1, 0, +1).
/// This is the spin-1 rotation D(phi, theta, -phi); the (2,3) entry carries
/// e^{-i phi} so that the block is unitary for every azimuth.
inline CMat3 exchange_block(double theta, double phi) {
  // At the south pole sin(theta) and cos(theta/2) are taken as exact zeros;
  // std::sin(pi) would otherwise leave ~1e-16 debris in the exchange rule.
  const bool south = theta == kPi;
  const double c = south ? 0.0 : std::cos(0.5 * theta);
  const double s = std::sin(0.5 * theta);
  const double c2 = c * c;
  const double s2 = s * s;
  const double h = south ? 0.0 : std::sin(theta) * kInvSqrt2;
  const cplx e = std::polar(1.0, phi);
  const cplx ec = std::conj(e);
  CMat3 u;
  u << c2, -ec * h, ec * ec * s2,
       e * h, std::cos(theta), -ec * h,
       e * e * s2, e * h, c2;
  return u;
}

inline CMat3 exchange_block(const Angles& a) { return exchange_block(a.theta, a.phi); }

/// Additive perturbation of one block entry; used to check that the
/// verification suite notices a corrupted exchange matrix.
struct BlockFault {
  int row = 1;
  int col = 1;
  cplx delta = 1e-3;
};

/// Source of U(r). The default model is the exact closed form.
class ExchangeModel {
 public:
  ExchangeModel() = default;
  explicit ExchangeModel(BlockFault fault) : fault_(fault) {}

  [[nodiscard]] bool faulty() const { return fault_.has_value(); }

  [[nodiscard]] CMat3 block(const Angles& a) const {
    CMat3 u = exchange_block(a);
    if (fault_) u(fault_->row, fault_->col) += fault_->delta;
    return u;
  }

  /// Block-diagonal form in the scheme basis ordering.
  [[nodiscard]] CMat10 full_scheme(const Angles& a) const {
    const CMat3 b = block(a);
    CMat10 u = CMat10::Zero();
    for (int m = -1; m <= 1; ++m) u.block<3, 3>(3 * (m + 1), 3 * (m + 1)) = b;
    u(kSingletIndex, kSingletIndex) = 1.0;
    return u;
  }

  /// U(r) acting on raw coordinates. Written as I + S (U - I) S^dagger so that
  /// U(theta = 0) is the identity without rounding from the basis change.
  [[nodiscard]] CMat10 full(const Angles& a) const {
    static const CMat10 s = scheme_basis();
    const CMat10 delta = full_scheme(a) - CMat10::Identity();
    CMat10 u = CMat10::Identity() + s * delta * s.adjoint();
    // The e3/e4 corner carries kInvSqrt2^2, which is not exactly 1/2.
    const cplx d = 0.5 * delta(scheme_index(0, 0), scheme_index(0, 0));
    u(2, 2) = 1.0 + d, u(2, 3) = d;
    u(3, 2) = d, u(3, 3) = 1.0 + d;
    return u;
  }

 private:
  std::optional<BlockFault> fault_;
};

inline CMat10 exchange_full(const SpherePoint& r) { return ExchangeModel{}.full(r.angles()); }

// ---------------------------------------------------------------------------
// Spin labels

/// Product label M = (m1, m2), m_i in {+1/2, -1/2}.
enum class ProductLabel { up_up, up_down, down_up, down_down };

inline constexpr std::array<ProductLabel, 4> kProductLabels{
    ProductLabel::up_up, ProductLabel::up_down, ProductLabel::down_up, ProductLabel::down_down};

/// M -> M-bar = (m2, m1).
constexpr ProductLabel swapped(ProductLabel m) {
  switch (m) {
    case ProductLabel::up_down:
      return ProductLabel::down_up;
    case ProductLabel::down_up:
      return ProductLabel::up_down;
    default:
      return m;
  }
}

inline std::string_view to_string(ProductLabel m) {
  constexpr std::array<std::string_view, 4> names{"++", "+-", "-+", "--"};
  return names[static_cast<int>(m)];
}

/// |M> = e1, e3, e4, e2 for ++, +-, -+, --.
inline CVec10 product_vector(ProductLabel m) {
  static constexpr std::array<int, 4> raw{0, 2, 3, 1};
  CVec10 v = CVec10::Zero();
  v[raw[static_cast<int>(m)]] = 1.0;
  return v;
}

/// Total-spin label (j, m) with j in {0, 1}.
struct TotalLabel {
  int j = 1;
  int m = 0;

  [[nodiscard]] bool valid() const { return (j == 1 && m >= -1 && m <= 1) || (j == 0 && m == 0); }
  friend bool operator==(const TotalLabel&, const TotalLabel&) = default;
};

inline constexpr std::array<TotalLabel, 4> kTotalLabels{TotalLabel{1, 1}, TotalLabel{1, 0},
                                                        TotalLabel{1, -1}, TotalLabel{0, 0}};

inline CVec10 total_vector(TotalLabel t) {
  if (!t.valid()) throw std::invalid_argument("total_vector: invalid (j, m) label");
  return t.j == 1 ? scheme_vector(t.m, 0) : singlet_vector();
}

/// Clebsch-Gordan coefficients <M | j m>: rows follow kTotalLabels, columns kProductLabels.
inline Eigen::Matrix4d clebsch_gordan() {
  Eigen::Matrix4d c = Eigen::Matrix4d::Zero();
  c(0, 0) = 1.0;                               // |1,+1> = |++>
  c(1, 1) = kInvSqrt2, c(1, 2) = kInvSqrt2;    // |1, 0> = (|+-> + |-+>)/sqrt2
  c(2, 3) = 1.0;                               // |1,-1> = |-->
  c(3, 1) = kInvSqrt2, c(3, 2) = -kInvSqrt2;   // |0, 0> = (|+-> - |-+>)/sqrt2
  return c;
}

// ---------------------------------------------------------------------------
// Transported basis

/// The transported triplet member inside V_m, in block coordinates (k = -1, 0, +1):
/// (-e^{-i phi} sin(theta)/sqrt2, cos(theta), e^{i phi} sin(theta)/sqrt2).
inline CVec3 transported_block_vector(const Angles& a) {
  const double h = a.theta == kPi ? 0.0 : std::sin(a.theta) * kInvSqrt2;
  return CVec3(-std::polar(h, -a.phi), std::cos(a.theta), std::polar(h, a.phi));
}

/// |jm(r)> from the closed form; the singlet is constant.
inline CVec10 transported_basis(TotalLabel t, const Angles& a) {
  if (!t.valid()) throw std::invalid_argument("transported_basis: invalid (j, m) label");
  if (t.j == 0) return singlet_vector();
  const CVec3 w = transported_block_vector(a);
  return w[0] * scheme_vector(t.m, -1) + w[1] * scheme_vector(t.m, 0) + w[2] * scheme_vector(t.m, 1);
}

/// |M(r)> = U(r)|M>.
inline CVec10 transported_product(const ExchangeModel& model, ProductLabel m, const Angles& a) {
  return model.full(a) * product_vector(m);
}

/// sup over samples and M of || |M-bar(-r)> - (-1)^{2s} |M(r)> || for s = 1/2.
inline double exchange_rule_residual(const ExchangeModel& model, std::span<const Angles> samples) {
  double r = 0.0;
  for (const auto& a : samples) {
    const CMat10 u = model.full(a);
    const CMat10 u_anti = model.full(a.antipode());
    for (ProductLabel m : kProductLabels) {
      const CVec10 here = u * product_vector(m);
      const CVec10 there = u_anti * product_vector(swapped(m));
      r = std::max(r, (there + here).norm());
    }
  }
  return r;
}

/// Total-spin form: |1m(-r)> = -|1m(r)>, |00(-r)> = |00(r)>.
inline double total_exchange_residual(const ExchangeModel& model, std::span<const Angles> samples) {
  double r = 0.0;
  for (const auto& a : samples) {
    const CMat10 u = model.full(a);
    const CMat10 u_anti = model.full(a.antipode());
    for (TotalLabel t : kTotalLabels) {
      const double sign = t.j == 1 ? -1.0 : 1.0;
      r = std::max(r, (u_anti * total_vector(t) - sign * (u * total_vector(t))).norm());
    }
  }
  return r;
}

inline constexpr double kMinParallelStep = 1e-7;
inline constexpr double kMaxParallelStep = 1e-3;

/// sup over t-samples and label pairs of |<M'(r(t)) | d/dt M(r(t))>|, with the
/// derivative taken by central differences of step h.
inline double br_parallel_residual(const ExchangeModel& model, const Curve& curve, double h,
                                   int t_samples = 201) {
  if (!(h >= kMinParallelStep && h <= kMaxParallelStep)) {
    throw std::invalid_argument("br_parallel_residual: step must lie in [1e-7, 1e-3]");
  }
  if (t_samples < 2) throw std::invalid_argument("br_parallel_residual: need at least 2 samples");
  auto frame = [&](double t) {
    const CMat10 u = model.full(curve.at(t).angles());
    Eigen::Matrix<cplx, 10, 4> f;
    for (ProductLabel m : kProductLabels) f.col(static_cast<int>(m)) = u * product_vector(m);
    return f;
  };
  double r = 0.0;
  for (int i = 0; i < t_samples; ++i) {
    const double t = static_cast<double>(i) / (t_samples - 1);
    const auto f = frame(t);
    const auto df = ((frame(t + h) - frame(t - h)) / (2.0 * h)).eval();
    r = std::max(r, (f.adjoint() * df).cwiseAbs().maxCoeff());
  }
  return r;
}

/// Projection onto |m>^(0) inside V_m.
inline CMat3 projector_P0() {
  CMat3 p = CMat3::Zero();
  p(1, 1) = 1.0;
  return p;
}

/// P_m(r) = U(r) P0 U(r)^dagger.
inline CMat3 projector_Pm(const ExchangeModel& model, const Angles& a) {
  const CMat3 u = model.block(a);
  return u * projector_P0() * u.adjoint();
}

/// P_m(r) = |jm(r)><jm(r)| from the closed-form transported vector.
inline CMat3 projector_Pm_transported(const Angles& a) {
  const CVec3 w = transported_block_vector(a);
  return w * w.adjoint();
}

/// P_m as a field over S^2 in block coordinates (same for every m).
inline ProjectorField<3> triplet_block_field() {
  return {[](const SpherePoint& x) { return projector_Pm_transported(x.angles()); }, std::nullopt, true,
          "P_m"};
}

/// |1m(r)><1m(r)| inside the full 10-dimensional space.
inline ProjectorField<10> triplet_line_field(int m) {
  const TotalLabel t{1, m};
  if (!t.valid()) throw std::invalid_argument("triplet_line_field: m must be -1, 0 or +1");
  return {[t](const SpherePoint& x) {
            const CVec10 v = transported_basis(t, x.angles());
            return CMat10(v * v.adjoint());
          },
          std::nullopt, true, "P_{1," + std::to_string(m) + "}"};
}

inline ProjectorField<10> singlet_field() {
  const CVec10 s = singlet_vector();
  const CMat10 p = s * s.adjoint();
  return {[p](const SpherePoint&) { return p; },
          ProjectorField<10>::Derivative([](const SpherePoint&, const Vec3&) { return CMat10::Zero().eval(); }),
          true, "P_{00}"};
}

// ---------------------------------------------------------------------------
// Two-spin wave functions |Psi(r)> = sum_M psi_M(r) |M(r)>.

enum class BasisMode { product, total };

struct TwoSpinWaveFunction {
  BasisMode mode = BasisMode::product;
  /// Indexed like kProductLabels (product mode) or kTotalLabels (total mode).
  std::array<ScalarField, 4> coefficients{ScalarField::zero(), ScalarField::zero(), ScalarField::zero(),
                                          ScalarField::zero()};

  [[nodiscard]] const ScalarField& operator[](ProductLabel m) const {
    return coefficients[static_cast<int>(m)];
  }

  [[nodiscard]] TwoSpinWaveFunction to_product() const { return change_basis(BasisMode::product); }
  [[nodiscard]] TwoSpinWaveFunction to_total() const { return change_basis(BasisMode::total); }

 private:
  // psi_M = sum_T C(T, M) psi_T and psi_T = sum_M C(T, M) psi_M; C is real orthogonal.
  [[nodiscard]] TwoSpinWaveFunction change_basis(BasisMode target) const {
    if (target == mode) return *this;
    const Eigen::Matrix4d c = clebsch_gordan();
    const Eigen::Matrix4d map = target == BasisMode::product ? Eigen::Matrix4d(c.transpose()) : c;
    TwoSpinWaveFunction out;
    out.mode = target;
    for (int i = 0; i < 4; ++i) {
      ScalarField acc = ScalarField::zero().with_parity(Parity::none);
      bool first = true;
      for (int j = 0; j < 4; ++j) {
        if (map(i, j) == 0.0) continue;
        ScalarField term = cplx(map(i, j)) * coefficients[j];
        acc = first ? term : acc + term;
        first = false;
      }
      out.coefficients[i] = acc;
    }
    return out;
  }
};

inline CVec10 assemble_wavefunction(const ExchangeModel& model, const TwoSpinWaveFunction& psi,
                                    const SpherePoint& x, const Angles& a) {
  const TwoSpinWaveFunction p = psi.to_product();
  const CMat10 u = model.full(a);
  CVec10 v = CVec10::Zero();
  for (ProductLabel m : kProductLabels) v += p[m](x) * (u * product_vector(m));
  return v;
}

inline CVec10 assemble_wavefunction(const ExchangeModel& model, const TwoSpinWaveFunction& psi,
                                    const SpherePoint& x) {
  return assemble_wavefunction(model, psi, x, x.angles());
}

struct SpinStatisticsReport {
  double singlevalued_residual = 0.0;           // sup || |Psi(-r)> - |Psi(r)> ||
  double coefficient_relation_residual = 0.0;  // sup |psi_{M-bar}(-r) + psi_M(r)|
};

inline SpinStatisticsReport spin_statistics_check(const ExchangeModel& model, const TwoSpinWaveFunction& psi,
                                                  std::span<const SpherePoint> samples) {
  const TwoSpinWaveFunction p = psi.to_product();
  SpinStatisticsReport rep;
  for (const auto& x : samples) {
    const Angles a = x.angles();
    const CVec10 here = assemble_wavefunction(model, p, x, a);
    const CVec10 there = assemble_wavefunction(model, p, -x, a.antipode());
    rep.singlevalued_residual = std::max(rep.singlevalued_residual, (there - here).norm());
    for (ProductLabel m : kProductLabels) {
      rep.coefficient_relation_residual =
          std::max(rep.coefficient_relation_residual, std::abs(p[swapped(m)](-x) + p[m](x)));
    }
  }
  return rep;
}

}  // namespace spinbundle
