#include <gtest/gtest.h>

#include <random>

#include "spinbundle/polynomial.hpp"
#include "spinbundle/sampling.hpp"
#include "spinbundle/section_algebra.hpp"

using namespace spinbundle;

namespace {

ScalarField poly(std::string_view s) { return ScalarField::from_polynomial(Polynomial::parse(s)); }

}  // namespace

TEST(Polynomial, ParsesAndEvaluates) {
  const Polynomial p = Polynomial::parse("2*x1^2*x3 - 0.5*x2 + 3");
  const Vec3 x(0.5, -1.0, 2.0);
  EXPECT_DOUBLE_EQ(p(x), 2 * 0.25 * 2.0 + 0.5 + 3.0);
  EXPECT_EQ(p.degree(), 3);
  EXPECT_EQ(p.parity(), Parity::none);
  EXPECT_EQ(Polynomial::parse("x1*x2*x3 - x3").parity(), Parity::odd);
  EXPECT_EQ(Polynomial::parse("x1^2 + 1").parity(), Parity::even);
  EXPECT_EQ(Polynomial::parse("-x3").parity(), Parity::odd);
}

TEST(Polynomial, ParserRejectsMalformedInput) {
  for (const char* bad : {"", "x4", "x1^", "2**x1", "x1 x2", "x1^9", "x1^5*x2^4", "y"}) {
    EXPECT_THROW(Polynomial::parse(bad), std::invalid_argument) << bad;
  }
  EXPECT_NO_THROW(Polynomial::parse("x1^8"));
}

TEST(Polynomial, ToStringRoundTrips) {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 20; ++k) {
    const Polynomial p = Polynomial::random(rng, 5, Parity::none);
    const Polynomial q = Polynomial::parse(p.to_string());
    for (const auto& x : sample_sphere(k, 20)) EXPECT_NEAR(p(x.coords()), q(x.coords()), 1e-14);
  }
}

TEST(Polynomial, RandomRespectsParity) {
  std::mt19937_64 rng(6);
  for (int k = 0; k < 20; ++k) {
    EXPECT_EQ(Polynomial::random(rng, 5, Parity::odd).parity(), Parity::odd);
    EXPECT_EQ(Polynomial::random(rng, 4, Parity::even).parity(), Parity::even);
  }
}

TEST(ScalarField, ParityResidualAndDecomposition) {
  const auto xs = sample_sphere(31, 300);
  const ScalarField f = poly("x1 + x2^2 + 0.3*x1*x2*x3");
  EXPECT_GT(parity_residual(f, Parity::odd, xs), 0.1);
  const auto [e, o] = parity_decompose(f);
  EXPECT_LT(parity_residual(e, Parity::even, xs), 1e-15);
  EXPECT_LT(parity_residual(o, Parity::odd, xs), 1e-15);
  for (const auto& x : xs) EXPECT_NEAR(std::abs(e(x) + o(x) - f(x)), 0.0, 1e-15);
}

TEST(ScalarField, RequireParityUsesDeclarationThenProbes) {
  EXPECT_NO_THROW(require_parity(poly("x3"), Parity::odd, "t"));
  EXPECT_THROW(require_parity(poly("x3^2"), Parity::odd, "t"), ParityViolation);
  const ScalarField undeclared([](const SpherePoint& x) { return cplx(x.x1() * x.x2() * x.x3()); }, Parity::none);
  EXPECT_NO_THROW(require_parity(undeclared, Parity::odd, "t"));
  EXPECT_THROW(require_parity(undeclared, Parity::even, "t"), ParityViolation);
}

// Oracle: f_a = x_a a, evaluated directly.
TEST(Section, OddFieldGivesProjectorFixedEvenCoefficients) {
  const auto xs = sample_sphere(32, 500);
  const ScalarField a = poly("x3 - 0.5*x1^2*x2 + 2*x1*x2*x3");
  const SectionXi s = section_from_odd(a);
  EXPECT_LT(projector_fixed_residual(s, xs), 1e-15);
  EXPECT_LT(coefficient_parity_residual(s, xs), 1e-15);
  for (const auto& x : xs) {
    for (int i = 1; i <= 3; ++i) {
      EXPECT_NEAR(std::abs(s.coefficient(chart_from_index(i))(x) - x.coord(i) * a(x)), 0.0, 1e-15);
    }
  }
}

TEST(Section, EvenFieldRejected) {
  EXPECT_THROW(section_from_odd(poly("x1^2")), ParityViolation);
}

TEST(Section, BijectionRoundTripsOnRandomOddFields) {
  const auto xs = sample_sphere(33, 2048);
  std::mt19937_64 rng(33);
  for (int k = 0; k < 100; ++k) {
    const ScalarField a = ScalarField::from_polynomial(Polynomial::random(rng, 5, Parity::odd));
    const ScalarField back = odd_from_section(section_from_odd(a));
    for (const auto& x : xs) ASSERT_LE(std::abs(back(x) - a(x)), 1e-12);
  }
}

TEST(Section, ProjectMinusThenRoundTrip) {
  const auto xs = sample_sphere(34, 500);
  const SectionXi g({poly("1 + x1^2"), poly("x2*x3"), poly("x1*x3 - 2")});
  const SectionXi f = project_minus(g);
  EXPECT_LT(projector_fixed_residual(f, xs), 1e-14);
  const SectionXi f2 = section_from_odd(odd_from_section(f));
  for (const auto& x : xs) {
    EXPECT_LT((f2.coefficient_values(x) - f.coefficient_values(x)).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(Section, NonFixedCoefficientsRejected) {
  const SectionXi g({poly("1"), ScalarField::zero(), ScalarField::zero()});
  EXPECT_THROW(odd_from_section(g), DomainError);
}

TEST(Section, ValueIsSumOfGenerators) {
  const ScalarField a = poly("x1 + x3");
  const SectionXi s = section_from_odd(a);
  for (const auto& x : sample_sphere(35, 200)) {
    const ProjectivePoint q = project(x);
    // e([x]) = a(rep) * rep for f_a = x_a a.
    const Vec3 r = q.rep().coords();
    EXPECT_LT((s.value(x) - a(q.rep()) * r.cast<cplx>()).norm(), 1e-14);
  }
}

TEST(Pullback, OddFieldGivesInvariantSingleValuedSection) {
  const auto xs = sample_sphere(36, 500);
  const PullbackSection sigma = pullback_T(section_from_odd(poly("x3")));
  EXPECT_LT(invariance_residual(sigma, GroupAction::tau_tilde(), xs), 1e-14);
  const auto r = singlevaluedness_residuals(sigma, xs);
  EXPECT_LT(r.same_value, 1e-14);
  EXPECT_GT(r.opposite_value, 0.1);
}

TEST(Pullback, InvarianceMatchesSingleValuednessForTauTilde) {
  const auto xs = sample_sphere(37, 300);
  for (const char* s : {"x3", "x1^2 + x2", "1", "x1*x2"}) {
    const PullbackSection sigma(poly(s), ChiVariant::odd_linear);
    const double inv = invariance_residual(sigma, GroupAction::tau_tilde(), xs);
    EXPECT_NEAR(inv, singlevaluedness_residuals(sigma, xs).same_value, 1e-14) << s;
  }
}

TEST(Pullback, InvarianceMatchesAntiSingleValuednessForTauPrime) {
  const auto xs = sample_sphere(38, 300);
  for (const char* s : {"x3", "x1^2 + x2", "1", "x1*x2"}) {
    const PullbackSection sigma(poly(s), ChiVariant::even_constant);
    const double inv = invariance_residual(sigma, GroupAction::tau_prime(), xs);
    EXPECT_NEAR(inv, singlevaluedness_residuals(sigma, xs).opposite_value, 1e-14) << s;
  }
}

TEST(Pullback, BindingMismatchRejected) {
  const PullbackSection sigma(poly("x3"), ChiVariant::odd_linear);
  EXPECT_THROW(g_action_on_section(sigma, GroupElement::exchange(), GroupAction::tau_tilde(ChiVariant::odd_harmonic)),
               BindingMismatch);
  EXPECT_THROW(pullback_T(section_from_odd(poly("x3")), ChiVariant::even_constant), ParityViolation);
}

TEST(Pullback, IdentityActsTrivially) {
  const auto xs = sample_sphere(39, 100);
  const PullbackSection sigma(poly("x1 + x2^2"), ChiVariant::odd_harmonic);
  const PullbackSection same =
      g_action_on_section(sigma, GroupElement::identity(), GroupAction::tau_tilde(ChiVariant::odd_harmonic));
  for (const auto& x : xs) EXPECT_LT((same.fiber_value(x) - sigma.fiber_value(x)).norm(), 1e-14);
}
