#pragma once

#include "miura/poly.hpp"

#include <span>
#include <string>

namespace miura {

/// Reduced quotient of polynomials with monic denominator. Canonical, so
/// structural equality is value equality.
class RatFunc {
 public:
  RatFunc() : den_(1) {}
  RatFunc(const Poly& p) : num_(p), den_(1) {}  // NOLINT(google-explicit-constructor)
  RatFunc(const Rational& c) : num_(c), den_(1) {}  // NOLINT(google-explicit-constructor)
  RatFunc(long c) : num_(c), den_(1) {}  // NOLINT(google-explicit-constructor)
  RatFunc(const Poly& num, const Poly& den);

  static RatFunc variable(std::size_t var) { return RatFunc(Poly::variable(var)); }

  const Poly& num() const { return num_; }
  const Poly& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }
  bool is_one() const { return num_.is_one() && den_.is_one(); }
  bool is_polynomial() const { return den_.is_one(); }
  bool is_constant() const { return num_.is_constant() && den_.is_one(); }
  Rational constant_value() const { return num_.constant_value(); }
  std::uint32_t support() const { return num_.support() | den_.support(); }

  RatFunc operator-() const;
  RatFunc& operator+=(const RatFunc& o);
  RatFunc& operator-=(const RatFunc& o);
  RatFunc& operator*=(const RatFunc& o);
  RatFunc& operator/=(const RatFunc& o);
  friend RatFunc operator+(RatFunc a, const RatFunc& b) { return a += b; }
  friend RatFunc operator-(RatFunc a, const RatFunc& b) { return a -= b; }
  friend RatFunc operator*(RatFunc a, const RatFunc& b) { return a *= b; }
  friend RatFunc operator/(RatFunc a, const RatFunc& b) { return a /= b; }
  friend bool operator==(const RatFunc& a, const RatFunc& b) { return a.num_ == b.num_ && a.den_ == b.den_; }
  friend bool operator!=(const RatFunc& a, const RatFunc& b) { return !(a == b); }

  RatFunc inverse() const;
  RatFunc pow(int e) const;
  RatFunc derivative(std::size_t var) const;
  RatFunc scaled(const Rational& c) const;

  /// Substitute var := value; throws PoleError if the denominator vanishes.
  RatFunc evaluate(std::size_t var, const Rational& value) const;
  Rational evaluate(std::span<const Rational> point) const;
  double evaluate_double(std::span<const double> point) const;

  std::size_t hash() const { return num_.hash() * 131 + den_.hash(); }

 private:
  void normalize_sign();
  Poly num_;
  Poly den_;
};

std::string to_string(const RatFunc& f, std::span<const std::string> names);

}  // namespace miura

namespace miura {

/// Substitutes every coefficient variable v by images[v] (images.size() >= number of variables used).
RatFunc compose(const RatFunc& f, std::span<const RatFunc> images);

}  // namespace miura
