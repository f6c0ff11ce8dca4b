#pragma once

#include <complex>
#include <stdexcept>

#include <Eigen/Dense>

namespace spinbundle {

using cplx = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;

template <int N>
using CVec = Eigen::Matrix<cplx, N, 1>;
template <int N>
using CMat = Eigen::Matrix<cplx, N, N>;

using CVec3 = CVec<3>;
using CMat3 = CMat<3>;
using CVec10 = CVec<10>;
using CMat10 = CMat<10>;

/// Vector in the ambient C^3 in which the line bundles are embedded.
using FiberVector = CVec3;

inline constexpr double kPi = 3.14159265358979323846;

namespace tol {
/// Coordinates with |x| at or below this are treated as zero (chart boundaries,
/// canonical representative).
inline constexpr double kZero = 1e-12;
/// Unit-sphere membership.
inline constexpr double kUnit = 1e-12;
/// Relative residual ||(1-P)z|| / ||z|| allowed for fiber membership.
inline constexpr double kFiber = 1e-10;
/// Sampled functional identities (parity, projector-fixed sections).
inline constexpr double kFunctional = 1e-10;
}  // namespace tol

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class OutsideChart : public DomainError {
 public:
  using DomainError::DomainError;
};

class NotInFiber : public DomainError {
 public:
  using DomainError::DomainError;
};

class ParityViolation : public DomainError {
 public:
  using DomainError::DomainError;
};

class BindingMismatch : public DomainError {
 public:
  using DomainError::DomainError;
};

class NotAProjector : public DomainError {
 public:
  using DomainError::DomainError;
};

}  // namespace spinbundle
