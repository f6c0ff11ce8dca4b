#pragma once

#include <algorithm>
#include <cstdint>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "spinbundle/berry_robbins.hpp"
#include "spinbundle/experiments.hpp"
#include "spinbundle/polynomial.hpp"
#include "spinbundle/transport.hpp"

namespace spinbundle::cli {

enum ExitCode : int { kOk = 0, kChecksFailed = 1, kUsage = 2 };

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

inline std::string sci(double v) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(3) << v;
  return os.str();
}

inline std::string fixed6(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(6) << v;
  return os.str();
}

inline Angles parse_angles(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos) throw UsageError("--at expects theta,phi");
  std::size_t used = 0;
  double theta = 0.0;
  double phi = 0.0;
  try {
    theta = std::stod(s.substr(0, comma), &used);
    if (used != comma) throw UsageError("--at: malformed theta");
    const std::string rest = s.substr(comma + 1);
    phi = std::stod(rest, &used);
    if (used != rest.size()) throw UsageError("--at: malformed phi");
  } catch (const std::logic_error&) {
    throw UsageError("--at expects two numbers theta,phi");
  }
  if (!(theta >= 0.0 && theta <= kPi)) throw UsageError("--at: theta must lie in [0, pi]");
  if (!std::isfinite(phi)) throw UsageError("--at: phi must be finite");
  if (theta == 0.0 || theta == kPi) phi = 0.0;
  return {theta, wrap_azimuth(phi)};
}

inline Curve parse_loop(const std::string& s) {
  const SpherePoint north = SpherePoint::from_cartesian(0.0, 0.0, 1.0);
  if (s == "antipodal") return Curve::great_circle(north, Vec3::UnitX(), kPi);
  if (s == "great-circle") return Curve::great_circle(north, Vec3::UnitX(), 2.0 * kPi);
  const std::string prefix = "small-circle:";
  if (s.rfind(prefix, 0) == 0) {
    double r = 0.0;
    try {
      std::size_t used = 0;
      const std::string num = s.substr(prefix.size());
      r = std::stod(num, &used);
      if (used != num.size()) throw UsageError("bad radius");
    } catch (const std::logic_error&) {
      throw UsageError("--loop small-circle:<radius> needs a numeric radius");
    }
    if (!(r > 0.0 && r < kPi)) throw UsageError("--loop small-circle radius must lie in (0, pi)");
    return Curve::small_circle(Vec3::UnitZ(), r);
  }
  throw UsageError("--loop must be antipodal, great-circle or small-circle:<radius>");
}

template <class F>
auto with_field(const std::string& bundle, ChiVariant chi_map, F&& f) {
  if (bundle == "xi-minus") return f(minus_field(chi_map));
  if (bundle == "xi-plus") return f(plus_field());
  if (bundle == "br:singlet") return f(singlet_field());
  if (bundle == "br:-1") return f(triplet_line_field(-1));
  if (bundle == "br:0") return f(triplet_line_field(0));
  if (bundle == "br:1" || bundle == "br:+1") return f(triplet_line_field(1));
  throw UsageError("--bundle must be xi-minus, xi-plus, br:-1, br:0, br:1 or br:singlet");
}

inline void print_report(const VerificationReport& r, OutputFormat fmt, std::ostream& out) {
  if (fmt == OutputFormat::json) {
    out << to_json(r).dump(2) << '\n';
    return;
  }
  std::size_t width = 0;
  for (const auto& c : r.checks) width = std::max(width, c.check_id.size());
  int failed = 0;
  for (const auto& c : r.checks) {
    if (!c.pass) ++failed;
    out << (c.pass ? "PASS  " : "FAIL  ") << std::left << std::setw(static_cast<int>(width) + 2) << c.check_id
        << std::right << std::setw(11) << sci(c.residual) << "  <= " << std::setw(9) << sci(c.tolerance) << "  "
        << c.anchor << '\n';
  }
  out << (failed == 0 ? "PASS" : "FAIL") << ": " << (r.checks.size() - failed) << "/" << r.checks.size()
      << " checks passed (seed " << r.config.seed << ", " << fixed6(r.wall_ms / 1000.0) << " s)\n";
}

/// Entry point shared by the executable and the tests.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Line bundles over RP^2, Grassmann holonomy and two-spin exchange checks", "spinbundle"};
  app.require_subcommand(1);
  app.fallthrough();

  SuiteConfig cfg;
  std::string format = "text";
  std::string fault = "none";
  bool no_timing = false;
  app.add_option("--seed", cfg.seed, "RNG seed");
  app.add_option("--samples", cfg.samples, "sample points per check (>= 64)");
  app.add_option("--ode-steps", cfg.ode_steps, "RK4 steps for transport (>= 16)");
  app.add_option("--fd-step", cfg.fd_step, "finite-difference step for the parallel condition");
  app.add_option("--tol-algebraic", cfg.tol_algebraic, "tolerance for algebraic identities");
  app.add_option("--tol-functional", cfg.tol_functional, "tolerance for functional identities");
  app.add_option("--tol-holonomy", cfg.tol_holonomy, "tolerance for holonomy values");
  app.add_option("--format", format, "text or json")->check(CLI::IsMember({"text", "json"}));
  app.add_option("--fault-inject", fault, "none, exchange-entry or coefficient-parity")
      ->check(CLI::IsMember({"none", "exchange-entry", "coefficient-parity"}));
  app.add_flag("--no-timing", no_timing, "report wall_ms as 0 for reproducible output");

  auto* verify = app.add_subcommand("verify", "run the full verification suite");

  auto* hol = app.add_subcommand("holonomy", "holonomy of a line bundle around a loop");
  std::string bundle = "xi-minus";
  std::string loop = "antipodal";
  std::string chi_name = "odd-linear";
  int steps = kDefaultTransportSteps;
  hol->add_option("--bundle", bundle, "xi-minus | xi-plus | br:-1 | br:0 | br:1 | br:singlet");
  hol->add_option("--loop", loop, "antipodal | great-circle | small-circle:<radius>");
  hol->add_option("--steps", steps, "RK4 steps (>= 16)");
  hol->add_option("--chi", chi_name, "odd chi for xi-minus")->check(CLI::IsMember({"odd-linear", "odd-harmonic"}));

  auto* exch = app.add_subcommand("exchange", "exchange block and residuals at one point");
  std::string at;
  exch->add_option("--at", at, "theta,phi in radians")->required();

  auto* expt = app.add_subcommand("experiment", "five-step singlevaluedness experiment");
  std::string field;
  std::string expt_chi = "odd-linear";
  expt->add_option("--chi", expt_chi, "odd-linear | odd-harmonic | even-constant")
      ->check(CLI::IsMember({"odd-linear", "odd-harmonic", "even-constant"}));
  expt->add_option("--field", field, "coefficient polynomial, e.g. \"x3 - 0.5*x1^2*x2\"")->required();

  std::vector<const char*> argv{"spinbundle"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      out << app.help();
      return kOk;
    }
    err << "error: " << e.what() << '\n' << app.help();
    return kUsage;
  }

  try {
    cfg.format = format == "json" ? OutputFormat::json : OutputFormat::text;
    cfg.fault = *fault_from_string(fault);
    try {
      cfg.validate();
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }

    if (*verify) {
      VerificationReport r = run_suite(cfg);
      if (no_timing) r.wall_ms = 0.0;
      print_report(r, cfg.format, out);
      return r.all_pass ? kOk : kChecksFailed;
    }

    if (*hol) {
      if (steps < kMinTransportSteps) throw UsageError("--steps must be >= 16");
      const Curve c = parse_loop(loop);
      const cplx h = with_field(bundle, *chi_variant_from_string(chi_name),
                                [&](const auto& f) { return holonomy(f, c, steps); });
      if (cfg.format == OutputFormat::json) {
        out << nlohmann::json{{"bundle", bundle}, {"loop", loop}, {"steps", steps}, {"re", h.real()},
                              {"im", h.imag()}}
                   .dump(2)
            << '\n';
      } else {
        out << "holonomy " << bundle << " around " << loop << ": " << fixed6(h.real()) << " (imag "
            << sci(h.imag()) << ", " << steps << " steps)\n";
      }
      return kOk;
    }

    if (*exch) {
      const Angles a = parse_angles(at);
      const ExchangeModel model = cfg.fault == Fault::exchange_entry ? ExchangeModel(BlockFault{}) : ExchangeModel{};
      const CMat3 u = model.block(a);
      const CMat10 full = model.full(a);
      const double unitarity = (full.adjoint() * full - CMat10::Identity()).norm();
      const std::vector<Angles> one{a};
      const double rule = exchange_rule_residual(model, one);
      if (cfg.format == OutputFormat::json) {
        nlohmann::json rows = nlohmann::json::array();
        for (int i = 0; i < 3; ++i) {
          nlohmann::json row = nlohmann::json::array();
          for (int j = 0; j < 3; ++j) row.push_back({u(i, j).real(), u(i, j).imag()});
          rows.push_back(row);
        }
        out << nlohmann::json{{"theta", a.theta}, {"phi", a.phi}, {"block", rows}, {"unitarity_residual", unitarity},
                              {"exchange_rule_residual", rule}}
                   .dump(2)
            << '\n';
      } else {
        out << "U block at theta=" << fixed6(a.theta) << ", phi=" << fixed6(a.phi) << " (k = -1, 0, +1):\n";
        for (int i = 0; i < 3; ++i) {
          out << "  ";
          for (int j = 0; j < 3; ++j) {
            out << std::setw(10) << fixed6(u(i, j).real()) << (u(i, j).imag() < 0 ? " - " : " + ") << std::setw(8)
                << fixed6(std::abs(u(i, j).imag())) << "i  ";
          }
          out << '\n';
        }
        out << "unitarity residual      " << sci(unitarity) << '\n'
            << "exchange-rule residual  " << sci(rule) << '\n';
      }
      return kOk;
    }

    if (*expt) {
      Polynomial p;
      try {
        p = Polynomial::parse(field);
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      const ChiVariant v = *chi_variant_from_string(expt_chi);
      const auto xs = sample_sphere(cfg.seed, static_cast<std::size_t>(cfg.samples));
      const FiveStepReport r = five_step_experiment(ScalarField::from_polynomial(p), v, xs, cfg.tol_functional);
      auto pres = [](const PresentationResiduals& pr) {
        return nlohmann::json{{"action", pr.action},
                              {"invariance_residual", pr.invariance},
                              {"same_value_residual", pr.same_value},
                              {"opposite_value_residual", pr.opposite_value}};
      };
      if (cfg.format == OutputFormat::json) {
        out << nlohmann::json{{"chi", expt_chi},
                              {"field", p.to_string()},
                              {"field_parity", std::string(to_string(p.parity()))},
                              {"odd_presentation", pres(r.odd)},
                              {"witness_residual", r.witness_residual},
                              {"even_presentation", pres(r.even)},
                              {"vacuous", r.vacuous},
                              {"invariant", r.verdict.invariant},
                              {"singlevalued", r.verdict.singlevalued},
                              {"anti_singlevalued", r.verdict.anti_singlevalued}}
                   .dump(2)
            << '\n';
      } else {
        auto line = [&](const char* step, const PresentationResiduals& pr) {
          out << step << pr.action << ": invariance " << sci(pr.invariance) << ", |v(-x)-v(x)| "
              << sci(pr.same_value) << ", |v(-x)+v(x)| " << sci(pr.opposite_value) << '\n';
        };
        out << "step 1  coefficient a = " << p.to_string() << " (" << to_string(p.parity()) << ")\n";
        line("step 3  ", r.odd);
        out << "step 4  witness residual " << sci(r.witness_residual) << '\n';
        line("step 5  ", r.even);
        auto yn = [](bool b) { return b ? "yes" : "no"; };
        if (r.vacuous) {
          out << "verdict (" << expt_chi << "): vacuous, section is zero\n";
        } else {
          out << "verdict (" << expt_chi << "): invariant " << yn(r.verdict.invariant) << ", singlevalued "
              << yn(r.verdict.singlevalued) << ", anti-singlevalued " << yn(r.verdict.anti_singlevalued) << '\n';
        }
      }
      return kOk;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace spinbundle::cli
