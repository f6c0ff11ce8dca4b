#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "spinbundle/berry_robbins.hpp"
#include "spinbundle/config_space.hpp"
#include "spinbundle/line_bundle.hpp"
#include "spinbundle/polynomial.hpp"
#include "spinbundle/sampling.hpp"
#include "spinbundle/section_algebra.hpp"
#include "spinbundle/transport.hpp"

namespace spinbundle {

// ---------------------------------------------------------------------------
// Five-step singlevaluedness experiment.
//
// The same section is viewed in two G-isomorphic presentations of one bundle:
// (q*xi_-, tau~) with an odd chi, and (eta, tau') with the even chi' = e1.
// Invariance survives the change of presentation; the sign of |Psi(-x)> does not.

struct PresentationResiduals {
  std::string action;
  double invariance = 0.0;
  double same_value = 0.0;
  double opposite_value = 0.0;
};

struct Verdict {
  bool invariant = false;
  bool singlevalued = false;
  bool anti_singlevalued = false;

  friend bool operator==(const Verdict&, const Verdict&) = default;
};

struct FiveStepReport {
  ChiVariant chi_variant = ChiVariant::odd_linear;
  std::string source_digest;      // step 1
  double source_sup = 0.0;
  PresentationResiduals odd;      // steps 2-3
  double witness_residual = 0.0;  // step 4
  PresentationResiduals even;     // step 5
  bool vacuous = false;
  Verdict verdict;                // read off the presentation selected by chi_variant
};

inline constexpr double kVacuousSup = 1e-8;

namespace detail {

inline PresentationResiduals presentation_residuals(const PullbackSection& s, const GroupAction& action,
                                                    std::span<const SpherePoint> xs) {
  const SinglevaluednessResiduals sv = singlevaluedness_residuals(s, xs);
  return {action.label(), invariance_residual(s, action, xs), sv.same_value, sv.opposite_value};
}

}  // namespace detail

/// phi(x, lambda chi(x)) = (x, lambda chi'(x)): the coefficient-transfer G-isomorphism.
inline FiberPoint coefficient_transfer(ChiVariant odd_chi, ChiVariant even_chi, const FiberPoint& z) {
  return {z.base, fiber_coefficient(odd_chi, z.base, z.v) * chi(even_chi, z.base)};
}

/// sup over random fiber elements and g of ||phi(tau~_g z) - tau'_g(phi z)||.
inline double witness_residual(ChiVariant odd_chi, std::span<const SpherePoint> xs, std::uint64_t seed) {
  const GroupAction tilde = GroupAction::tau_tilde(odd_chi);
  const GroupAction prime = GroupAction::tau_prime(ChiVariant::even_constant);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double r = 0.0;
  for (const auto& x : xs) {
    const cplx lambda(u(rng), u(rng));
    const FiberPoint z{x, lambda * chi(odd_chi, x)};
    for (GroupElement g : kGroupElements) {
      const FiberPoint lhs = coefficient_transfer(odd_chi, ChiVariant::even_constant, tilde(g, z));
      const FiberPoint rhs = prime(g, coefficient_transfer(odd_chi, ChiVariant::even_constant, z));
      r = std::max(r, (lhs.v - rhs.v).norm() + distance(lhs.base, rhs.base));
    }
  }
  return r;
}

/// Runs the experiment on the pull-back coefficient a directly. No parity check
/// is made on a, so non-odd coefficients can be fed in to watch invariance fail.
inline FiveStepReport five_step_experiment(const ScalarField& a, ChiVariant variant,
                                           std::span<const SpherePoint> xs, double tol = tol::kFunctional,
                                           std::uint64_t witness_seed = 0x5eedULL) {
  FiveStepReport rep;
  rep.chi_variant = variant;
  rep.source_digest = a.label();
  const ChiVariant odd_chi = parity_of(variant) == Parity::odd ? variant : ChiVariant::odd_linear;

  const PullbackSection psi_odd(a, odd_chi);
  const PullbackSection psi_even(a, ChiVariant::even_constant);
  rep.source_sup = sup_norm(psi_odd, xs);
  rep.odd = detail::presentation_residuals(psi_odd, GroupAction::tau_tilde(odd_chi), xs);
  rep.witness_residual = witness_residual(odd_chi, xs, witness_seed);
  rep.even = detail::presentation_residuals(psi_even, GroupAction::tau_prime(), xs);

  rep.vacuous = rep.source_sup < kVacuousSup;
  if (!rep.vacuous) {
    const PresentationResiduals& sel = parity_of(variant) == Parity::odd ? rep.odd : rep.even;
    const double t = tol * std::max(1.0, rep.source_sup);
    rep.verdict = {sel.invariance <= t, sel.same_value <= t, sel.opposite_value <= t};
  }
  return rep;
}

/// Step 1 from a section of xi_-: coefficients must be even and fixed by p_-.
inline FiveStepReport five_step_experiment(const SectionXi& source, ChiVariant variant,
                                           std::span<const SpherePoint> xs, double tol = tol::kFunctional) {
  if (coefficient_parity_residual(source, probe_points()) > tol::kFunctional) {
    throw DomainError("five_step_experiment: source coefficients are not even");
  }
  FiveStepReport rep = five_step_experiment(odd_from_section(source), variant, xs, tol);
  rep.source_digest.clear();
  for (const auto& f : source.coefficients()) {
    if (!rep.source_digest.empty()) rep.source_digest += "; ";
    rep.source_digest += f.label();
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Verification suite.

enum class OutputFormat { text, json };

enum class Fault { none, exchange_entry, coefficient_parity };

inline std::string_view to_string(Fault f) {
  switch (f) {
    case Fault::none:
      return "none";
    case Fault::exchange_entry:
      return "exchange-entry";
    case Fault::coefficient_parity:
      return "coefficient-parity";
  }
  return "?";
}

inline std::optional<Fault> fault_from_string(std::string_view s) {
  if (s == "none") return Fault::none;
  if (s == "exchange-entry") return Fault::exchange_entry;
  if (s == "coefficient-parity") return Fault::coefficient_parity;
  return std::nullopt;
}

inline constexpr double kFaultMagnitude = 1e-3;

struct SuiteConfig {
  std::uint64_t seed = 0;
  int samples = 2048;
  int ode_steps = kDefaultTransportSteps;
  double fd_step = 1e-5;
  double tol_algebraic = 1e-12;
  double tol_functional = 1e-10;
  double tol_holonomy = 1e-6;
  OutputFormat format = OutputFormat::text;
  Fault fault = Fault::none;

  /// Throws std::invalid_argument describing the first violated constraint.
  void validate() const {
    if (samples < 64) throw std::invalid_argument("samples must be >= 64");
    if (ode_steps < kMinTransportSteps) throw std::invalid_argument("ode_steps must be >= 16");
    if (!(fd_step >= kMinParallelStep && fd_step <= kMaxParallelStep)) {
      throw std::invalid_argument("fd_step must lie in [1e-7, 1e-3]");
    }
    if (!(tol_algebraic > 0.0) || !(tol_functional > 0.0) || !(tol_holonomy > 0.0)) {
      throw std::invalid_argument("tolerances must be positive");
    }
  }

  friend bool operator==(const SuiteConfig&, const SuiteConfig&) = default;
};

/// Which injected faults a check is expected to notice.
enum Sensitivity : unsigned { kSensNone = 0, kSensExchange = 1, kSensParity = 2 };

struct CheckResult {
  std::string check_id;
  std::string anchor;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  unsigned sensitive_to = kSensNone;  // not serialized

  friend bool operator==(const CheckResult& a, const CheckResult& b) {
    return a.check_id == b.check_id && a.anchor == b.anchor && a.residual == b.residual &&
           a.tolerance == b.tolerance && a.pass == b.pass;
  }
};

struct VerificationReport {
  std::string suite = "spinbundle";
  SuiteConfig config;
  std::vector<CheckResult> checks;
  bool all_pass = false;
  double wall_ms = 0.0;

  [[nodiscard]] std::vector<std::string> failing() const {
    std::vector<std::string> out;
    for (const auto& c : checks) {
      if (!c.pass) out.push_back(c.check_id);
    }
    return out;
  }

  [[nodiscard]] const CheckResult* find(std::string_view id) const {
    for (const auto& c : checks) {
      if (c.check_id == id) return &c;
    }
    return nullptr;
  }
};

inline bool fault_expected_to_fail(const CheckResult& c, Fault f) {
  switch (f) {
    case Fault::none:
      return false;
    case Fault::exchange_entry:
      return (c.sensitive_to & kSensExchange) != 0;
    case Fault::coefficient_parity:
      return (c.sensitive_to & kSensParity) != 0;
  }
  return false;
}

// --- JSON -------------------------------------------------------------------

inline nlohmann::json to_json(const SuiteConfig& c) {
  return {{"seed", c.seed},
          {"samples", c.samples},
          {"ode_steps", c.ode_steps},
          {"fd_step", c.fd_step},
          {"tol_algebraic", c.tol_algebraic},
          {"tol_functional", c.tol_functional},
          {"tol_holonomy", c.tol_holonomy},
          {"format", c.format == OutputFormat::json ? "json" : "text"},
          {"fault", std::string(to_string(c.fault))}};
}

inline SuiteConfig suite_config_from_json(const nlohmann::json& j) {
  SuiteConfig c;
  c.seed = j.at("seed").get<std::uint64_t>();
  c.samples = j.at("samples").get<int>();
  c.ode_steps = j.at("ode_steps").get<int>();
  c.fd_step = j.at("fd_step").get<double>();
  c.tol_algebraic = j.at("tol_algebraic").get<double>();
  c.tol_functional = j.at("tol_functional").get<double>();
  c.tol_holonomy = j.at("tol_holonomy").get<double>();
  c.format = j.at("format").get<std::string>() == "json" ? OutputFormat::json : OutputFormat::text;
  const auto f = fault_from_string(j.at("fault").get<std::string>());
  if (!f) throw std::invalid_argument("unknown fault in report config");
  c.fault = *f;
  return c;
}

inline nlohmann::json to_json(const CheckResult& c) {
  return {{"check_id", c.check_id},
          {"anchor", c.anchor},
          {"residual", c.residual},
          {"tolerance", c.tolerance},
          {"pass", c.pass}};
}

inline nlohmann::json to_json(const VerificationReport& r) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : r.checks) checks.push_back(to_json(c));
  return {{"suite", r.suite},
          {"seed", r.config.seed},
          {"config", to_json(r.config)},
          {"checks", std::move(checks)},
          {"all_pass", r.all_pass},
          {"wall_ms", r.wall_ms}};
}

inline VerificationReport report_from_json(const nlohmann::json& j) {
  VerificationReport r;
  r.suite = j.at("suite").get<std::string>();
  r.config = suite_config_from_json(j.at("config"));
  r.config.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& c : j.at("checks")) {
    r.checks.push_back({c.at("check_id").get<std::string>(), c.at("anchor").get<std::string>(),
                        c.at("residual").get<double>(), c.at("tolerance").get<double>(),
                        c.at("pass").get<bool>()});
  }
  r.all_pass = j.at("all_pass").get<bool>();
  r.wall_ms = j.at("wall_ms").get<double>();
  return r;
}

// --- Suite ------------------------------------------------------------------

namespace detail {

/// Residuals must be finite to survive JSON; "observed nothing" maps to a huge value.
inline double finite_or_max(double v) {
  return std::isfinite(v) ? v : std::numeric_limits<double>::max();
}

inline CheckResult make_check(std::string id, std::string anchor, double residual, double tolerance,
                              unsigned sens = kSensNone) {
  residual = finite_or_max(residual);
  const bool pass = residual <= tolerance;
  return {std::move(id), std::move(anchor), residual, tolerance, pass, sens};
}

/// Detection checks pass when `observed` exceeds `threshold`; residual = threshold / observed.
inline CheckResult make_detection(std::string id, std::string anchor, double threshold, double observed,
                                  unsigned sens = kSensNone) {
  const double r = observed > 0.0 ? threshold / observed : std::numeric_limits<double>::infinity();
  return make_check(std::move(id), std::move(anchor), r, 1.0, sens);
}

inline std::uint64_t job_seed(std::uint64_t seed, std::uint64_t job) {
  // splitmix64 step keeps per-job streams independent of scheduling.
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (job + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::vector<Angles> angles_of(std::span<const SpherePoint> xs) {
  std::vector<Angles> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(x.angles());
  return out;
}

/// Suite context shared read-only by all jobs.
struct SuiteContext {
  SuiteConfig cfg;
  ExchangeModel model;

  [[nodiscard]] std::vector<SpherePoint> points(std::uint64_t job, int n = -1) const {
    return sample_sphere(job_seed(cfg.seed, job), static_cast<std::size_t>(n < 0 ? cfg.samples : n));
  }

  /// Odd test coefficient of degree <= 5; under the parity fault an even term is added.
  [[nodiscard]] ScalarField test_coefficient() const {
    std::mt19937_64 rng(job_seed(cfg.seed, 1000));
    Polynomial p = Polynomial::random(rng, 5, Parity::odd);
    if (cfg.fault == Fault::coefficient_parity) {
      p.add_term(kFaultMagnitude, {0, 0, 0});
      p.add_term(kFaultMagnitude, {1, 1, 0});
    }
    return ScalarField::from_polynomial(std::move(p));
  }
};

using Job = std::function<std::vector<CheckResult>(const SuiteContext&)>;

// config_space + line_bundle ---------------------------------------------------

inline std::vector<CheckResult> atlas_checks(const SuiteContext& ctx) {
  const auto xs = ctx.points(1);
  double cocycle = 0.0;
  double partition = 0.0;
  double chart_rt = 0.0;
  double trivialization = 0.0;
  for (const auto& x : xs) {
    const ProjectivePoint q = project(x);
    double s = 0.0;
    for (Chart a : kCharts) {
      s += partition_phi(a, q) * partition_phi(a, q);
      if (!in_chart(a, q)) continue;
      chart_rt = std::max(chart_rt, distance(chart_inverse(a, chart_map(a, q)).rep(), q.rep()));
      for (Chart b : kCharts) {
        if (!in_chart(b, q)) continue;
        const cplx lam(0.3, -0.7);
        const FiberVector z = lam * chi(ChiVariant::odd_linear, x);
        const cplx va = local_trivialization(a, q, z);
        const cplx vb = local_trivialization(b, q, z);
        trivialization = std::max(trivialization, std::abs(vb - static_cast<double>(transition(b, a, q)) * va));
        for (Chart c : kCharts) {
          if (!in_chart(c, q)) continue;
          cocycle = std::max(cocycle, std::abs(static_cast<double>(transition(a, b, q) * transition(b, c, q) -
                                                                   transition(a, c, q))));
        }
      }
    }
    partition = std::max(partition, std::abs(s - 1.0));
  }
  const auto& c = ctx.cfg;
  return {make_check("atlas.cocycle", "g_ab g_bc = g_ac on triple overlaps", cocycle, 0.0),
          make_check("atlas.partition_of_unity", "sum_a phi_a^2 = 1", partition, c.tol_algebraic),
          make_check("atlas.chart_roundtrip", "h_a^{-1}(h_a([x])) = [x]", chart_rt, c.tol_algebraic),
          make_check("bundle.transition_compatibility", "v_b = g_ba v_a for local trivializations",
                     trivialization, c.tol_algebraic)};
}

template <int N>
void fold_projector(const CMat<N>& p, double& alg, double& trace) {
  const auto r = projector_residuals<N>(p);
  alg = std::max({alg, r.idempotency, r.hermiticity});
  trace = std::max(trace, r.trace);
}

inline std::vector<CheckResult> projector_checks(const SuiteContext& ctx) {
  const auto xs = ctx.points(2);
  double lin_a = 0, lin_t = 0, har_a = 0, har_t = 0, pm_a = 0, pm_t = 0, p0_a = 0, p0_t = 0;
  double even_minus = 0, even_pm = 0, pm_harmonic = 0, pm_conj = 0;
  fold_projector<3>(projector_P0(), p0_a, p0_t);
  for (const auto& x : xs) {
    const Angles a = x.angles();
    fold_projector<3>(projector_minus(x, ChiVariant::odd_linear), lin_a, lin_t);
    const CMat3 ph = projector_minus(x, ChiVariant::odd_harmonic);
    fold_projector<3>(ph, har_a, har_t);
    const CMat3 pm = projector_Pm_transported(a);
    fold_projector<3>(pm, pm_a, pm_t);
    even_minus = std::max(even_minus, (projector_minus(-x) - projector_minus(x)).norm());
    even_pm = std::max(even_pm, (projector_Pm_transported(a.antipode()) - pm).norm());
    pm_harmonic = std::max(pm_harmonic, (pm - ph).cwiseAbs().maxCoeff());
    pm_conj = std::max(pm_conj, (projector_Pm(ctx.model, a) - pm).cwiseAbs().maxCoeff());
  }
  const auto& c = ctx.cfg;
  return {
      make_check("projector.minus_linear.algebra", "p-^2 = p- = p-^dagger (chi = x)", lin_a, c.tol_algebraic),
      make_check("projector.minus_linear.trace", "tr p- = 1 (chi = x)", lin_t, c.tol_functional),
      make_check("projector.minus_harmonic.algebra", "p-^2 = p- = p-^dagger (harmonic chi)", har_a,
                 c.tol_algebraic),
      make_check("projector.minus_harmonic.trace", "tr p- = 1 (harmonic chi)", har_t, c.tol_functional),
      make_check("projector.minus_even", "p-(-x) = p-(x)", even_minus, c.tol_algebraic),
      make_check("projector.P0.algebra", "P0 = diag(0,1,0) is a rank-1 projector", std::max(p0_a, p0_t),
                 c.tol_algebraic),
      make_check("projector.Pm.algebra", "P_m(r)^2 = P_m(r) = P_m(r)^dagger", pm_a, c.tol_algebraic),
      make_check("projector.Pm.trace", "tr P_m(r) = 1", pm_t, c.tol_functional),
      make_check("projector.Pm.even", "P_m(-r) = P_m(r)", even_pm, c.tol_algebraic),
      make_check("projector.Pm.harmonic", "P_m(r) = p-(r) for the harmonic chi, entrywise", pm_harmonic,
                 c.tol_algebraic),
      make_check("projector.Pm.conjugation", "U(r) P0 U(r)^dagger = |jm(r)><jm(r)|", pm_conj, c.tol_algebraic,
                 kSensExchange),
  };
}

// section_algebra -------------------------------------------------------------

inline std::vector<CheckResult> section_checks(const SuiteContext& ctx) {
  constexpr int kFamilies = 100;
  const auto xs = ctx.points(3, std::min(ctx.cfg.samples, 2048));
  std::mt19937_64 rng(job_seed(ctx.cfg.seed, 3));
  double a_to_f_to_a = 0.0;
  double f_to_a_to_f = 0.0;
  double fixed = 0.0;
  double decomposition = 0.0;
  for (int k = 0; k < kFamilies; ++k) {
    const ScalarField a = ScalarField::from_polynomial(Polynomial::random(rng, 5, Parity::odd));
    const SectionXi s = section_from_odd(a);
    const ScalarField back = odd_from_section(s);
    fixed = std::max(fixed, projector_fixed_residual(s, xs));

    // f built as p-(g) for a random even triple, then f -> a -> f.
    std::array<ScalarField, 3> g;
    for (auto& gi : g) gi = ScalarField::from_polynomial(Polynomial::random(rng, 4, Parity::even));
    const SectionXi f = project_minus(SectionXi(g));
    const SectionXi f2 = section_from_odd(odd_from_section(f).with_parity(Parity::odd));

    const ScalarField mixed = ScalarField::from_polynomial(Polynomial::random(rng, 3, Parity::none));
    const auto [ev, od] = parity_decompose(mixed);
    for (const auto& x : xs) {
      a_to_f_to_a = std::max(a_to_f_to_a, std::abs(back(x) - a(x)));
      f_to_a_to_f = std::max(f_to_a_to_f, (f2.coefficient_values(x) - f.coefficient_values(x)).cwiseAbs().maxCoeff());
      decomposition = std::max({decomposition, std::abs(ev(x) + od(x) - mixed(x)), std::abs(ev(x) - ev(-x)),
                                std::abs(od(x) + od(-x))});
    }
    fixed = std::max(fixed, projector_fixed_residual(f, xs));
  }

  // The suite's own test coefficient, run through the pull-back and tau~.
  const PullbackSection sigma(ctx.test_coefficient(), ChiVariant::odd_linear);
  const double image_inv = invariance_residual(sigma, GroupAction::tau_tilde(), xs);

  const auto& c = ctx.cfg;
  return {
      make_check("section.roundtrip_a_f_a", "a -> f_a = x_a a -> sum_a x_a f_a = a", a_to_f_to_a, c.tol_algebraic),
      make_check("section.roundtrip_f_a_f", "f -> a -> f for f in p-(A^3)", f_to_a_to_f, c.tol_algebraic),
      make_check("section.projector_fixed", "p- f = f", fixed, c.tol_functional),
      make_check("section.parity_decomposition", "a = a_+ + a_- with a_+ even, a_- odd", decomposition,
                 c.tol_algebraic),
      make_check("section.image_invariant", "T(f) is fixed by tau~", image_inv, c.tol_functional, kSensParity),
  };
}

// transport -------------------------------------------------------------------

inline std::vector<Curve> antipodal_paths(std::uint64_t seed) {
  SphereSampler s(seed);
  const SpherePoint n = SpherePoint::from_cartesian(0.0, 0.0, 1.0);
  const SpherePoint e1 = SpherePoint::from_cartesian(1.0, 0.0, 0.0);
  const SpherePoint p = s.next();
  const Curve loop = Curve::small_circle(Vec3(0.2, -0.4, 0.9), 0.5, 0.3);
  std::vector<Curve> out;
  out.push_back(Curve::great_circle(n, Vec3::UnitX(), kPi));
  out.push_back(Curve::great_circle(e1, Vec3::UnitY(), kPi, 0.5));
  out.push_back(Curve::great_circle(p, s.next().coords(), kPi, -0.3));
  out.push_back(Curve::concatenate(loop, Curve::great_circle(loop.at(1.0), Vec3(0.3, 0.8, -0.1), kPi)));
  return out;
}

inline std::vector<Curve> contractible_loops(std::uint64_t seed) {
  SphereSampler s(seed);
  std::vector<Curve> out;
  out.push_back(Curve::small_circle(Vec3::UnitZ(), 0.7));
  out.push_back(Curve::small_circle(s.next().coords(), 1.2, 0.4));
  out.push_back(Curve::great_circle(s.next(), s.next().coords(), 2.0 * kPi, 0.2));
  const Curve half = Curve::great_circle(SpherePoint::from_cartesian(0.0, 1.0, 0.0), Vec3::UnitZ(), kPi);
  out.push_back(Curve::concatenate(half, Curve::great_circle(half.at(1.0), Vec3(1.0, 0.0, 0.5), kPi)));
  return out;
}

inline constexpr int kConvergenceCoarseSteps = 32;

inline std::vector<CheckResult> holonomy_checks(const SuiteContext& ctx) {
  const auto& c = ctx.cfg;
  const auto paths = antipodal_paths(job_seed(c.seed, 4));
  const ProjectorField<3> lin = minus_field(ChiVariant::odd_linear);
  const ProjectorField<3> har = minus_field(ChiVariant::odd_harmonic);
  std::vector<CheckResult> out;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const cplx h = holonomy(lin, paths[i], c.ode_steps);
    out.push_back(make_check("holonomy.xi_minus.antipodal_" + std::to_string(i), "antipodal loop on xi-: h = -1",
                             std::abs(h + 1.0), c.tol_holonomy));
  }
  out.push_back(make_check("holonomy.xi_minus_harmonic.antipodal", "antipodal loop, harmonic chi: h = -1",
                           std::abs(holonomy(har, paths[2], c.ode_steps) + 1.0), c.tol_holonomy));
  const auto loops = contractible_loops(job_seed(c.seed, 5));
  out.push_back(make_check("holonomy.xi_minus.contractible", "loop closed on S^2: h = +1",
                           flatness_report(lin, std::span<const Curve>(loops), c.ode_steps), c.tol_holonomy));
  out.push_back(make_check("holonomy.xi_plus.trivial", "trivial bundle: h = +1 exactly",
                           std::abs(holonomy(plus_field(), paths[1], c.ode_steps) - 1.0), 0.0));

  // Fourth-order RK4: doubling the step count should shrink the error ~16x; require >= 8x.
  const double e1 = std::abs(holonomy(lin, paths[1], kConvergenceCoarseSteps) + 1.0);
  const double e2 = std::abs(holonomy(lin, paths[1], 2 * kConvergenceCoarseSteps) + 1.0);
  out.push_back(make_detection("holonomy.step_doubling", "|h+1| shrinks >= 8x per step doubling", 8.0, e1 / e2));
  return out;
}

// berry_robbins ---------------------------------------------------------------

inline CMat3 literal_block_half_pi() {
  const double r = kInvSqrt2;
  CMat3 m;
  m << 0.5, -r, 0.5, r, 0.0, -r, 0.5, r, 0.5;
  return m;
}

inline std::vector<CheckResult> exchange_checks(const SuiteContext& ctx) {
  const auto xs = ctx.points(6);
  const auto as = angles_of(xs);
  const auto& model = ctx.model;
  double unitary = 0.0;
  double det = 0.0;
  double singlet = 0.0;
  double gram = 0.0;
  double via_u = 0.0;
  double jm_rule = 0.0;
  const CMat10 basis = scheme_basis();
  for (const auto& a : as) {
    const CMat3 b = model.block(a);
    const CMat10 u = model.full(a);
    unitary = std::max({unitary, (b.adjoint() * b - CMat3::Identity()).norm(),
                        (u.adjoint() * u - CMat10::Identity()).norm()});
    det = std::max(det, std::abs(b.determinant() - 1.0));
    singlet = std::max(singlet, (u * singlet_vector() - singlet_vector()).norm());
    Eigen::Matrix<cplx, 10, 4> t;
    for (int i = 0; i < 4; ++i) {
      t.col(i) = transported_basis(kTotalLabels[i], a);
      via_u = std::max(via_u, (u * total_vector(kTotalLabels[i]) - t.col(i)).norm());
      const double sign = kTotalLabels[i].j == 1 ? -1.0 : 1.0;
      jm_rule = std::max(jm_rule, (transported_basis(kTotalLabels[i], a.antipode()) - sign * t.col(i)).norm());
    }
    gram = std::max(gram, (t.adjoint() * t - Eigen::Matrix4cd::Identity()).norm());
  }
  double pole = 0.0;
  for (double phi : {0.0, 0.5, 1.7, 3.9, 6.0}) {
    pole = std::max(pole, (model.full(Angles{0.0, phi}) - CMat10::Identity()).cwiseAbs().maxCoeff());
  }
  const double literal = (model.block(Angles{kPi / 2, 0.0}) - literal_block_half_pi()).cwiseAbs().maxCoeff();
  const double ortho = (basis.adjoint() * basis - CMat10::Identity()).norm();
  const auto& c = ctx.cfg;
  return {
      make_check("exchange.unitarity", "U(r)^dagger U(r) = I", unitary, c.tol_algebraic, kSensExchange),
      make_check("exchange.determinant", "det U_m(r) = 1", det, c.tol_algebraic, kSensExchange),
      make_check("exchange.identity_at_pole", "U(theta = 0) = I", pole, 0.0, kSensExchange),
      make_check("exchange.block_half_pi", "U_m(pi/2, 0) matches the closed form", literal, c.tol_algebraic,
                 kSensExchange),
      make_check("exchange.rule_product", "|M-bar(-r)> = -|M(r)>", exchange_rule_residual(model, as),
                 c.tol_functional, kSensExchange),
      make_check("exchange.rule_total", "|1m(-r)> = -|1m(r)>, |00(-r)> = |00(r)> via U",
                 total_exchange_residual(model, as), c.tol_functional, kSensExchange),
      make_check("exchange.singlet_constant", "U(r)|00> = |00>", singlet, c.tol_algebraic),
      make_check("basis.scheme_orthonormal", "scheme basis of V is orthonormal", ortho, c.tol_algebraic),
      make_check("basis.transported_gram", "<jm(r)|j'm'(r)> = delta", gram, c.tol_algebraic),
      make_check("basis.transported_rule", "closed-form |jm(-r)> = -+|jm(r)>", jm_rule, c.tol_algebraic),
      make_check("basis.transported_via_U", "U(r)|jm> = |jm(r)>", via_u, c.tol_algebraic, kSensExchange),
  };
}

inline std::vector<Curve> parallel_curves(std::uint64_t seed) {
  SphereSampler s(seed);
  const SpherePoint n = SpherePoint::from_cartesian(0.0, 0.0, 1.0);
  return {Curve::great_circle(n, Vec3::UnitX(), kPi, 0.4),
          Curve::great_circle(n, Vec3(0.3, 1.0, 0.0), 1.5 * kPi, -0.5),
          Curve::great_circle(s.next(), s.next().coords(), 2.0 * kPi, 0.3)};
}

inline std::vector<CheckResult> parallel_checks(const SuiteContext& ctx) {
  const auto& c = ctx.cfg;
  const auto& model = ctx.model;
  const auto curves = parallel_curves(job_seed(c.seed, 7));
  double at_h = 0.0;
  double worst_order = 0.0;
  for (const auto& cv : curves) {
    at_h = std::max(at_h, br_parallel_residual(model, cv, c.fd_step));
    const double r1 = br_parallel_residual(model, cv, 1e-4);
    const double r2 = br_parallel_residual(model, cv, 5e-5);
    worst_order = std::max(worst_order, std::abs(std::log2(r1 / r2) - 2.0));
  }

  // Transport |M(r(0))> (closed form) through the rank-4 BR subbundle and
  // compare with U(r(1))|M>.
  const ProjectorField<10> p4(
      [](const SpherePoint& x) {
        CMat10 p = CMat10::Zero();
        for (TotalLabel t : kTotalLabels) {
          const CVec10 v = transported_basis(t, x.angles());
          p += v * v.adjoint();
        }
        return p;
      },
      std::nullopt, true, "P_BR");
  const Eigen::Matrix4d cg = clebsch_gordan();
  double cross = 0.0;
  for (const auto& cv : curves) {
    const Angles a0 = cv.at(0.0).angles();
    const CMat10 u1 = model.full(cv.at(1.0).angles());
    for (ProductLabel m : kProductLabels) {
      CVec10 v0 = CVec10::Zero();
      for (int t = 0; t < 4; ++t) v0 += cg(t, static_cast<int>(m)) * transported_basis(kTotalLabels[t], a0);
      const CVec10 v1 = parallel_transport(p4, cv, v0, c.ode_steps);
      cross = std::max(cross, (v1 - u1 * product_vector(m)).norm());
    }
  }
  return {
      make_check("parallel.br_condition", "<M'(r(t))|d/dt M(r(t))> = 0", at_h, 1e-8, kSensExchange),
      make_check("parallel.order", "central-difference residual decays as h^2", worst_order, 0.25, kSensExchange),
      make_check("parallel.grassmann_crosscheck", "Grassmann transport of |M(r(0))> reaches U(r(1))|M>", cross,
                 c.tol_holonomy, kSensExchange),
  };
}

inline std::vector<CheckResult> decomposition_checks(const SuiteContext& ctx) {
  const auto& c = ctx.cfg;
  const auto paths = antipodal_paths(job_seed(c.seed, 4));
  std::vector<CheckResult> out;
  for (int m = -1; m <= 1; ++m) {
    const cplx h = holonomy(triplet_line_field(m), paths[0], c.ode_steps);
    out.push_back(make_check("br.holonomy.triplet_" + std::to_string(m), "antipodal holonomy of |1m(r)>: -1",
                             std::abs(h + 1.0), c.tol_holonomy));
  }
  out.push_back(make_check("br.holonomy.block", "antipodal holonomy of P_m in V_m: -1",
                           std::abs(holonomy(triplet_block_field(), paths[2], c.ode_steps) + 1.0), c.tol_holonomy));
  out.push_back(make_check("br.holonomy.singlet", "antipodal holonomy of |00>: +1",
                           std::abs(holonomy(singlet_field(), paths[0], c.ode_steps) - 1.0), c.tol_holonomy));
  return out;
}

/// Coefficient families for the spin-statistics relation. Even indices obey
/// psi_{M-bar}(-r) = -psi_M(r) by construction; odd indices are generic.
inline TwoSpinWaveFunction spin_family(std::mt19937_64& rng, bool valid) {
  auto poly = [&](Parity p) { return Polynomial::random(rng, 3, p); };
  TwoSpinWaveFunction psi;
  if (!valid) {
    for (auto& f : psi.coefficients) f = ScalarField::from_polynomial(poly(Parity::none));
    return psi;
  }
  const ScalarField g = ScalarField::from_polynomial(poly(Parity::none));
  psi.coefficients[static_cast<int>(ProductLabel::up_up)] = ScalarField::from_polynomial(poly(Parity::odd));
  psi.coefficients[static_cast<int>(ProductLabel::down_down)] = ScalarField::from_polynomial(poly(Parity::odd));
  psi.coefficients[static_cast<int>(ProductLabel::up_down)] = g;
  psi.coefficients[static_cast<int>(ProductLabel::down_up)] =
      ScalarField([g](const SpherePoint& x) { return -g(-x); }, Parity::none, "-g(-r)");
  return psi;
}

inline constexpr int kSpinFamilies = 50;

inline std::vector<CheckResult> spin_statistics_checks(const SuiteContext& ctx) {
  const auto& c = ctx.cfg;
  const auto xs = ctx.points(8, std::min(c.samples, 512));
  std::mt19937_64 rng(job_seed(c.seed, 8));
  int disagreements = 0;
  double valid_sup = 0.0;
  double invalid_min = std::numeric_limits<double>::infinity();
  for (int k = 0; k < kSpinFamilies; ++k) {
    const bool valid = k % 2 == 0;
    const auto rep = spin_statistics_check(ctx.model, spin_family(rng, valid), xs);
    const bool both_small = rep.singlevalued_residual <= 1e-10 && rep.coefficient_relation_residual <= 1e-10;
    const bool both_large = rep.singlevalued_residual > 1e-3 && rep.coefficient_relation_residual > 1e-3;
    if (!both_small && !both_large) ++disagreements;
    if (valid) {
      valid_sup = std::max({valid_sup, rep.singlevalued_residual, rep.coefficient_relation_residual});
    } else {
      invalid_min = std::min({invalid_min, rep.singlevalued_residual, rep.coefficient_relation_residual});
    }
  }

  // psi_{1m} = x3 in the total basis: odd coefficient times odd basis vector.
  TwoSpinWaveFunction odd_triplet;
  odd_triplet.mode = BasisMode::total;
  odd_triplet.coefficients[0] = ScalarField::from_polynomial(Polynomial::coordinate(3));
  const double triplet = spin_statistics_check(ctx.model, odd_triplet, xs).singlevalued_residual;

  return {
      make_check("spinstat.equivalence", "(a) |Psi(-r)> = |Psi(r)> and (b) psi_Mbar(-r) = -psi_M(r) agree",
                 disagreements, 0.0, kSensExchange),
      make_check("spinstat.valid_families", "families obeying (b) are singlevalued", valid_sup, c.tol_functional,
                 kSensExchange),
      make_detection("spinstat.violations_detected", "families violating (b) are not singlevalued", 1e-3,
                     invalid_min),
      make_check("spinstat.odd_triplet", "psi_{1m} = x3 assembles to an even |Psi(r)>", triplet, c.tol_functional,
                 kSensExchange),
  };
}

// experiments -------------------------------------------------------------------

inline std::vector<CheckResult> five_step_checks(const SuiteContext& ctx) {
  const auto& c = ctx.cfg;
  const auto xs = ctx.points(9);
  const ScalarField a = ctx.test_coefficient();
  const FiveStepReport odd = five_step_experiment(a, ChiVariant::odd_linear, xs, c.tol_functional);
  const FiveStepReport even = five_step_experiment(a, ChiVariant::even_constant, xs, c.tol_functional);
  const FiveStepReport harmonic = five_step_experiment(a, ChiVariant::odd_harmonic, xs, c.tol_functional);

  // Paired verdict: invariance flags agree, the singlevaluedness pair swaps.
  const bool swap = !odd.vacuous && !even.vacuous && odd.verdict.invariant && even.verdict.invariant &&
                    odd.verdict.singlevalued && !odd.verdict.anti_singlevalued && !even.verdict.singlevalued &&
                    even.verdict.anti_singlevalued && harmonic.verdict == odd.verdict;

  // Invariance iff a is odd, in both presentations.
  std::mt19937_64 rng(job_seed(c.seed, 9));
  int mismatches = 0;
  const auto few = std::span<const SpherePoint>(xs).first(std::min<std::size_t>(xs.size(), 256));
  for (int k = 0; k < 20; ++k) {
    const Parity p = k % 2 == 0 ? Parity::odd : Parity::none;
    const ScalarField f = ScalarField::from_polynomial(Polynomial::random(rng, 4, p));
    for (ChiVariant v : {ChiVariant::odd_linear, ChiVariant::even_constant}) {
      const FiveStepReport r = five_step_experiment(f, v, few, c.tol_functional);
      if (r.verdict.invariant != (p == Parity::odd)) ++mismatches;
    }
  }

  const double scale = std::max(1.0, odd.source_sup);
  return {
      make_check("five_step.odd.invariant", "tau~ fixes T(Psi)", odd.odd.invariance / scale, c.tol_functional,
                 kSensParity),
      make_check("five_step.odd.singlevalued", "|Psi(-x)> = |Psi(x)> with odd chi", odd.odd.same_value / scale,
                 c.tol_functional, kSensParity),
      make_detection("five_step.odd.not_anti", "|Psi(-x)> != -|Psi(x)> with odd chi", 1e-3,
                     odd.odd.opposite_value / scale),
      make_check("five_step.witness", "coefficient transfer intertwines tau~ and tau'", odd.witness_residual,
                 c.tol_functional),
      make_check("five_step.even.invariant", "tau' fixes the transferred section", even.even.invariance / scale,
                 c.tol_functional, kSensParity),
      make_check("five_step.even.anti_singlevalued", "|Psi(-x)> = -|Psi(x)> with even chi'",
                 even.even.opposite_value / scale, c.tol_functional, kSensParity),
      make_detection("five_step.even.not_singlevalued", "|Psi(-x)> != |Psi(x)> with even chi'", 1e-3,
                     even.even.same_value / scale),
      make_check("five_step.verdict_swap", "invariance agrees, singlevaluedness sign flips", swap ? 0.0 : 1.0, 0.0,
                 kSensParity),
      make_check("five_step.invariance_iff_odd", "invariant in both presentations iff a is odd", mismatches, 0.0),
  };
}

inline std::vector<Job> suite_jobs() {
  return {atlas_checks,    projector_checks,     section_checks,         holonomy_checks, exchange_checks,
          parallel_checks, decomposition_checks, spin_statistics_checks, five_step_checks};
}

}  // namespace detail

/// Runs every check. Jobs run on a small thread pool; the report order is the
/// fixed job order, so the output depends only on the config.
inline VerificationReport run_suite(const SuiteConfig& cfg, unsigned threads = 0) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  detail::SuiteContext ctx{cfg, cfg.fault == Fault::exchange_entry ? ExchangeModel(BlockFault{1, 1, kFaultMagnitude})
                                                                   : ExchangeModel{}};
  const auto jobs = detail::suite_jobs();
  std::vector<std::vector<CheckResult>> results(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(jobs.size()));
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
          try {
            results[i] = jobs[i](ctx);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  VerificationReport rep;
  rep.config = cfg;
  for (auto& r : results) {
    for (auto& c : r) rep.checks.push_back(std::move(c));
  }
  rep.all_pass = std::all_of(rep.checks.begin(), rep.checks.end(), [](const CheckResult& c) { return c.pass; });
  rep.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

}  // namespace spinbundle
