#pragma once

#include <gmpxx.h>

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace miura {

using Rational = mpq_class;
using Integer = mpz_class;

/// Upper bound on coefficient variables (symbolic parameters plus base fields).
inline constexpr std::size_t kMaxVars = 8;

/// Exponent vector over the coefficient variables. Variable 0 is the most
/// significant in the graded lexicographic order.
struct Monomial {
  std::array<std::uint16_t, kMaxVars> exp{};
  std::uint16_t deg = 0;

  static Monomial variable(std::size_t var, unsigned power = 1);

  bool is_one() const { return deg == 0; }
  bool divides(const Monomial& other) const;
  std::uint32_t support() const;

  friend Monomial operator*(const Monomial& a, const Monomial& b);
  friend bool operator==(const Monomial& a, const Monomial& b) { return a.exp == b.exp; }
};

/// Graded lexicographic comparison: negative, zero or positive.
int compare(const Monomial& a, const Monomial& b);
/// a / b, requires b | a.
Monomial quotient(const Monomial& a, const Monomial& b);
Monomial min_exponents(const Monomial& a, const Monomial& b);

struct Term {
  Monomial mono;
  Rational coef;
};

/// Sparse multivariate polynomial over Q; terms are kept strictly decreasing
/// in graded lex order with no zero coefficients, so equality is structural.
class Poly {
 public:
  Poly() = default;
  Poly(const Rational& c);  // NOLINT(google-explicit-constructor)
  Poly(long c) : Poly(Rational(c)) {}  // NOLINT(google-explicit-constructor)

  static Poly variable(std::size_t var);
  static Poly monomial(const Monomial& m, const Rational& c);
  /// Builds from arbitrary (unsorted, possibly repeated) terms.
  static Poly from_terms(std::vector<Term> terms);

  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].mono.is_one()); }
  bool is_one() const;
  bool is_monomial() const { return terms_.size() == 1; }
  std::size_t size() const { return terms_.size(); }
  const std::vector<Term>& terms() const { return terms_; }
  const Term& leading() const { return terms_.front(); }
  Rational constant_value() const;

  Poly operator-() const;
  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  Poly& operator*=(const Poly& o);
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(const Poly& a, const Poly& b);
  friend bool operator==(const Poly& a, const Poly& b);
  friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

  Poly scaled(const Rational& c) const;
  Poly mul_monomial(const Monomial& m) const;
  Poly div_monomial(const Monomial& m) const;
  Poly pow(unsigned e) const;

  Poly derivative(std::size_t var) const;
  unsigned degree(std::size_t var) const;
  unsigned total_degree() const;
  /// Bitmask of variables that occur.
  std::uint32_t support() const;
  /// Largest monomial dividing every term.
  Monomial monomial_content() const;
  /// Coefficients in `var` (index = power), each free of `var`.
  std::vector<Poly> coefficients_in(std::size_t var) const;
  static Poly from_coefficients(const std::vector<Poly>& coeffs, std::size_t var);

  /// Substitute var := value.
  Poly evaluate(std::size_t var, const Rational& value) const;
  Rational evaluate(std::span<const Rational> point) const;
  double evaluate_double(std::span<const double> point) const;

  /// Leading coefficient normalised to one.
  Poly monic() const;
  std::size_t hash() const;

 private:
  std::vector<Term> terms_;
};

/// Exact quotient a / b when b divides a.
std::optional<Poly> divide_exact(const Poly& a, const Poly& b);
/// Monic greatest common divisor over Q (zero only when both are zero).
Poly gcd(const Poly& a, const Poly& b);
/// Exact square root up to sign, if one exists.
std::optional<Poly> sqrt_exact(const Poly& p);
std::optional<Rational> sqrt_exact(const Rational& q);

/// Canonical textual form, e.g. "-2/3*c*u^3 + u*v".
std::string to_string(const Poly& p, std::span<const std::string> names);
std::string to_string(const Rational& q);

}  // namespace miura
