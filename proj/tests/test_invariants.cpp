#include <doctest.h>

#include <cmath>

#include "miura/dsl.hpp"
#include "miura/errors.hpp"
#include "miura/fmanifold.hpp"
#include "miura/invariants.hpp"

using namespace miura;

namespace {

EvolutionarySystem sys_from(const std::string& text) { return to_system(parse_document(text)); }

}  // namespace

TEST_CASE("dispersionless invariants of the B2 flow") {
  EvolutionarySystem f = hierarchy_flow(catalog_potential("B2", std::nullopt), 1, 0);
  InvariantSeries inv = miura_invariant_series(f, Mode::Exact);
  ParseContext ctx = context_for(f);
  RatFunc a = parse_function("-(2*c+1)*u", ctx), b = parse_function("-2*(c+1)*u", ctx);
  REQUIRE(inv.exact.size() == 2);
  bool ordered = inv.exact[0][0] == a && inv.exact[1][0] == b;
  bool swapped = inv.exact[0][0] == b && inv.exact[1][0] == a;
  CHECK((ordered || swapped));
}

TEST_CASE("KdV symbol and dispersion relation") {
  EvolutionarySystem kdv = sys_from("system kdv\nvars u\nparam g\neps_order 2\nrhs u = u*D(u,1) + eps^2*g*D(u,3)\n");
  InvariantSeries inv = miura_invariant_series(kdv, Mode::Exact);
  ParseContext ctx = context_for(kdv);
  REQUIRE(inv.exact.size() == 1);
  CHECK(inv.exact[0][0] == parse_function("u", ctx));
  CHECK(inv.exact[0][1].is_zero());
  CHECK(inv.exact[0][2] == parse_function("g", ctx));

  EvolutionarySystem fixed = sys_from("system kdv\nvars u\nparam g = 3\neps_order 2\nrhs u = u*D(u,1) + eps^2*g*D(u,3)\n");
  std::vector<Rational> u0{Rational(1)};
  auto omega = dispersion_relations(fixed, u0, 3);
  REQUIRE(omega.size() == 1);
  CHECK(omega[0][1] == GaussianRational{Rational(-1), Rational(0)});
  CHECK(omega[0][2] == GaussianRational{Rational(0), Rational(0)});
  CHECK(omega[0][3] == GaussianRational{Rational(3), Rational(0)});
  CHECK(to_string(omega[0]) == "3*k^3 - k");
}

TEST_CASE("odd-order dispersion gives imaginary coefficients") {
  EvolutionarySystem s = sys_from("system b\nvars u\neps_order 1\nrhs u = u*D(u,1) + eps*D(u,2)\n");
  std::vector<Rational> u0{Rational(2)};
  auto omega = dispersion_relations(s, u0, 2);
  CHECK(omega[0][1] == GaussianRational{Rational(-2), Rational(0)});
  CHECK(omega[0][2] == GaussianRational{Rational(0), Rational(-1)});
}

TEST_CASE("two-component series and residual") {
  EvolutionarySystem s = sys_from(
      "system t\nvars u v\neps_order 2\ncurrent u = u*v + eps^2*D(v,2)\ncurrent v = u^2/2 + v^2/2 + eps^2*D(u,2)\n");
  InvariantSeries inv = miura_invariant_series(s, Mode::Exact);
  for (const auto& res : invariant_residual(s, inv))
    for (const auto& c : res) CHECK(c.is_zero());
  ParseContext ctx = context_for(s);
  // M = [[v, u], [u, v]] + z^2 [[0, 1], [1, 0]]: eigenvalues v ± (u + z^2).
  bool found = false;
  for (const auto& lam : inv.exact)
    if (lam[0] == parse_function("v + u", ctx)) {
      found = true;
      CHECK(lam[2] == RatFunc(1));
    }
  CHECK(found);
}

TEST_CASE("numeric mode agrees with exact mode") {
  EvolutionarySystem s = hierarchy_flow(catalog_potential("B2", Rational(1, 3)), 2, 1);
  std::vector<Rational> pt{Rational(3, 2), Rational(-2, 5)};
  InvariantSeries exact = miura_invariant_series(s, Mode::Exact);
  InvariantSeries num = miura_invariant_series(s, Mode::Numeric, pt);
  CHECK(num.max_relative_residual < 1e-9);
  REQUIRE(num.numeric.size() == 2);
  for (const auto& lam : num.numeric) {
    bool matched = false;
    for (const auto& ex : exact.exact) {
      double e = ex[0].evaluate(pt).get_d();
      if (std::abs(e - lam[0]) <= 1e-9 * std::max(1.0, std::abs(e))) matched = true;
    }
    CHECK(matched);
  }
}

TEST_CASE("degenerate symbols are rejected") {
  EvolutionarySystem s = sys_from("system d\nvars u v\neps_order 1\ncurrent u = u\ncurrent v = v\n");
  CHECK_THROWS_AS(miura_invariant_series(s, Mode::Exact), RepeatedRootError);
  EvolutionarySystem irr = sys_from("system i\nvars u v\neps_order 0\ncurrent u = v\ncurrent v = u^4/4\n");
  CHECK_THROWS_AS(miura_invariant_series(irr, Mode::Exact), FormError);
  std::vector<Rational> pt{Rational(2), Rational(1)};
  CHECK(miura_invariant_series(irr, Mode::Numeric, pt).numeric.size() == 2);
}
