#pragma once

#include <array>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "spinbundle/line_bundle.hpp"
#include "spinbundle/types.hpp"

namespace spinbundle {

/// Real polynomial in the ambient coordinates x1, x2, x3, restricted to S^2 on use.
class Polynomial {
 public:
  using Exponents = std::array<int, 3>;

  static constexpr int kMaxParsedDegree = 8;

  Polynomial() = default;

  void add_term(double coeff, Exponents e) {
    for (int k : e) {
      if (k < 0) throw std::invalid_argument("Polynomial: negative exponent");
    }
    terms_[e] += coeff;
  }

  static Polynomial coordinate(int alpha) {
    Polynomial p;
    Exponents e{0, 0, 0};
    e.at(alpha - 1) = 1;
    p.add_term(1.0, e);
    return p;
  }

  static Polynomial constant(double c) {
    Polynomial p;
    p.add_term(c, {0, 0, 0});
    return p;
  }

  [[nodiscard]] double operator()(const Vec3& x) const {
    // Power table up to the largest exponent; falls back to pow for huge ones.
    constexpr int kTable = 16;
    std::array<std::array<double, kTable + 1>, 3> pw;
    for (int k = 0; k < 3; ++k) {
      pw[k][0] = 1.0;
      for (int e = 1; e <= kTable; ++e) pw[k][e] = pw[k][e - 1] * x[k];
    }
    auto power = [&](int k, int e) { return e <= kTable ? pw[k][e] : std::pow(x[k], e); };
    double acc = 0.0;
    for (const auto& [e, c] : terms_) acc += c * power(0, e[0]) * power(1, e[1]) * power(2, e[2]);
    return acc;
  }

  [[nodiscard]] int degree() const {
    int d = 0;
    for (const auto& [e, c] : terms_) {
      if (c != 0.0) d = std::max(d, e[0] + e[1] + e[2]);
    }
    return d;
  }

  /// Parity under x -> -x, read off the monomial degrees. The zero polynomial is even.
  [[nodiscard]] Parity parity() const {
    bool has_even = false;
    bool has_odd = false;
    for (const auto& [e, c] : terms_) {
      if (c == 0.0) continue;
      ((e[0] + e[1] + e[2]) % 2 == 0 ? has_even : has_odd) = true;
    }
    if (has_even && has_odd) return Parity::none;
    return has_odd ? Parity::odd : Parity::even;
  }

  [[nodiscard]] Polynomial part(Parity which) const {
    Polynomial p;
    for (const auto& [e, c] : terms_) {
      const bool odd = (e[0] + e[1] + e[2]) % 2 == 1;
      if ((which == Parity::odd) == odd) p.add_term(c, e);
    }
    return p;
  }

  [[nodiscard]] const std::map<Exponents, double>& terms() const { return terms_; }

  [[nodiscard]] std::string to_string() const {
    std::ostringstream os;
    os.precision(17);
    bool first = true;
    for (const auto& [e, c] : terms_) {
      if (c == 0.0) continue;
      if (first) {
        if (c < 0.0) os << '-';
      } else {
        os << (c < 0.0 ? " - " : " + ");
      }
      first = false;
      os << std::abs(c);
      for (int k = 0; k < 3; ++k) {
        if (e[k] == 0) continue;
        os << "*x" << (k + 1);
        if (e[k] > 1) os << '^' << e[k];
      }
    }
    return first ? "0" : os.str();
  }

  /// Parses sums of terms like `c*x1^a*x2^b*x3^c`, e.g. "x3 - 0.5*x1^2*x2".
  static Polynomial parse(std::string_view text);

  /// Random real coefficients in [-1, 1] on every monomial of total degree <= max_degree
  /// whose degree matches the requested parity (all monomials for Parity::none).
  template <class Rng>
  static Polynomial random(Rng& rng, int max_degree, Parity parity) {
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    Polynomial p;
    for (int d = 0; d <= max_degree; ++d) {
      if (parity == Parity::odd && d % 2 == 0) continue;
      if (parity == Parity::even && d % 2 == 1) continue;
      for (int a = d; a >= 0; --a) {
        for (int b = d - a; b >= 0; --b) {
          p.add_term(coeff(rng), {a, b, d - a - b});
        }
      }
    }
    return p;
  }

 private:
  std::map<Exponents, double> terms_;
};

namespace detail {

class PolynomialParser {
 public:
  explicit PolynomialParser(std::string_view s) : s_(s) {}

  Polynomial run() {
    Polynomial p;
    skip_ws();
    if (at_end()) fail("empty polynomial");
    bool first = true;
    while (!at_end()) {
      double sign = 1.0;
      if (peek() == '+' || peek() == '-') {
        sign = peek() == '-' ? -1.0 : 1.0;
        ++pos_;
        skip_ws();
      } else if (!first) {
        fail("expected '+' or '-'");
      }
      first = false;
      term(p, sign);
      skip_ws();
    }
    return p;
  }

 private:
  void term(Polynomial& p, double sign) {
    double coeff = sign;
    Polynomial::Exponents e{0, 0, 0};
    factor(coeff, e);
    skip_ws();
    while (!at_end() && peek() == '*') {
      ++pos_;
      skip_ws();
      factor(coeff, e);
      skip_ws();
    }
    if (e[0] + e[1] + e[2] > Polynomial::kMaxParsedDegree) {
      fail("term degree exceeds " + std::to_string(Polynomial::kMaxParsedDegree));
    }
    p.add_term(coeff, e);
  }

  void factor(double& coeff, Polynomial::Exponents& e) {
    if (at_end()) fail("unexpected end of input");
    const char c = peek();
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const std::string rest(s_.substr(pos_));
      char* end = nullptr;
      const double v = std::strtod(rest.c_str(), &end);
      if (end == rest.c_str()) fail("malformed number");
      pos_ += static_cast<std::size_t>(end - rest.c_str());
      coeff *= v;
      return;
    }
    if (c == 'x') {
      ++pos_;
      if (at_end() || peek() < '1' || peek() > '3') fail("expected x1, x2 or x3");
      const int var = peek() - '1';
      ++pos_;
      int power = 1;
      skip_ws();
      if (!at_end() && peek() == '^') {
        ++pos_;
        skip_ws();
        const std::size_t start = pos_;
        while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
        if (start == pos_) fail("expected integer exponent");
        power = std::stoi(std::string(s_.substr(start, pos_ - start)));
      }
      e[var] += power;
      return;
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("polynomial parse error at column " + std::to_string(pos_ + 1) +
                                ": " + what);
  }

  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
  }
  [[nodiscard]] bool at_end() const { return pos_ >= s_.size(); }
  [[nodiscard]] char peek() const { return s_[pos_]; }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline Polynomial Polynomial::parse(std::string_view text) {
  return detail::PolynomialParser(text).run();
}

}  // namespace spinbundle
