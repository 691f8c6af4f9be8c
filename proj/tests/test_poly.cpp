#include <doctest.h>

#include "miura/errors.hpp"
#include "miura/ratfunc.hpp"
#include "support.hpp"

using namespace miura;

namespace {

const std::vector<std::string> kNames{"c", "u", "v", "w"};

Poly x(std::size_t i) { return Poly::variable(i); }

}  // namespace

TEST_CASE("polynomial arithmetic is canonical") {
  Poly a = x(1) * x(1) - x(2);
  Poly b = x(1) + x(2);
  CHECK(a * b == b * a);
  CHECK((a + b) - b == a);
  CHECK(to_string(a * b, kNames) == "u^3 + u^2*v - u*v - v^2");
  CHECK(to_string(Poly(Rational(-2, 3)) * x(0) * x(1).pow(3), kNames) == "-2/3*c*u^3");
  CHECK(divide_exact(a * b, b).value() == a);
  CHECK_FALSE(divide_exact(a, b).has_value());
}

TEST_CASE("gcd recovers planted common factors") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 60; ++trial) {
    Poly g = testing_support::random_poly(rng, 3, 3, 3);
    Poly a = testing_support::random_poly(rng, 3, 3, 3);
    Poly b = testing_support::random_poly(rng, 3, 3, 3);
    if (g.is_zero() || a.is_zero() || b.is_zero()) continue;
    Poly d = gcd(a * g, b * g);
    CHECK(divide_exact(d, g.monic()).has_value());
    CHECK(divide_exact(a * g, d).has_value());
    CHECK(divide_exact(b * g, d).has_value());
    Poly cofactor_gcd = gcd(divide_exact(a * g, d).value(), divide_exact(b * g, d).value());
    CHECK(cofactor_gcd.is_one());
  }
}

TEST_CASE("gcd with parameters in the coefficients") {
  Poly c = x(0), u = x(1), v = x(2);
  Poly f = (c.scaled(4) + Poly(3)) * u * u - v.scaled(2);
  Poly g = gcd(f * (u + c), f * (v - c * u));
  CHECK(g == f.monic());
}

TEST_CASE("exact square roots") {
  Poly p = x(1).scaled(3) - x(2) + Poly(Rational(1, 2));
  auto r = sqrt_exact(p * p);
  REQUIRE(r.has_value());
  CHECK((*r == p || *r == -p));
  CHECK_FALSE(sqrt_exact(p * p + Poly(1)).has_value());
  CHECK(sqrt_exact(Rational(9, 4)).value() == Rational(3, 2));
  CHECK_FALSE(sqrt_exact(Rational(2)).has_value());
}

TEST_CASE("rational functions form a field with canonical normalization") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    Poly a = testing_support::random_poly(rng, 3, 3, 3);
    Poly b = testing_support::random_poly(rng, 3, 3, 3);
    if (a.is_zero() || b.is_zero()) continue;
    RatFunc f(a, b), g(b, a);
    CHECK((f * g).is_one());
    RatFunc h = f + g;
    CHECK(h - g == f);
    CHECK(RatFunc(a * b.scaled(3), b * b.scaled(3)) == RatFunc(a, b));
  }
  RatFunc q(x(1), x(1) * x(2).scaled(2));
  CHECK(to_string(q, kNames) == "(1/2)/(v)");
  CHECK(q.den().leading().coef == 1);
}

TEST_CASE("pole detection") {
  RatFunc f(Poly(1), x(1));
  std::vector<Rational> pt{Rational(0), Rational(0), Rational(1), Rational(0)};
  CHECK_THROWS_AS(f.evaluate(pt), PoleError);
  CHECK_THROWS_AS(f.evaluate(1, Rational(0)), PoleError);
}
