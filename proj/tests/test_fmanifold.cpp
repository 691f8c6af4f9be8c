#include <doctest.h>

#include "miura/dsl.hpp"
#include "miura/errors.hpp"
#include "miura/fmanifold.hpp"

using namespace miura;

namespace {

ParseContext context_for(const VectorPotential& v) {
  ParseContext ctx;
  ctx.names = v.names;
  for (const auto& [name, value] : v.fixed_params) ctx.fixed_params[name] = value;
  return ctx;
}

RatFunc fn(const VectorPotential& v, const std::string& text) { return parse_function(text, context_for(v)); }

RationalMatrix antidiagonal(std::size_t n) {
  RationalMatrix eta(n, std::vector<Rational>(n));
  for (std::size_t i = 0; i < n; ++i) eta[i][n - 1 - i] = 1;
  return eta;
}

bool flows_commute(const EvolutionarySystem& a, const EvolutionarySystem& b) {
  return all_zero(commutator_direct(a, b));
}

}  // namespace

TEST_CASE("B2 structure constants") {
  VectorPotential v = catalog_potential("B2", std::nullopt);
  StructureConstants c = structure_constants(v);
  CHECK(c[0][0][1] == RatFunc(1));
  CHECK(c[0][0][0] == fn(v, "-4*(c+3/4)*u"));
  CHECK(c[1][1][1] == RatFunc(1));
  CHECK(c[1][0][1].is_zero());
}

TEST_CASE("catalog potentials are associative with unity") {
  for (const char* g : {"B2", "B3", "B4"}) {
    VectorPotential v = catalog_potential(g, std::nullopt);
    CHECK_MESSAGE(check_oriented_associativity(v).ok, g);
    CHECK_MESSAGE(check_unity(v).ok, g);
  }
  for (int m : {4, 6, 8}) {
    VectorPotential v = catalog_potential("I2", std::nullopt, m);
    CHECK(check_oriented_associativity(v).ok);
    CHECK(check_unity(v).ok);
  }
  VectorPotential d = catalog_potential("I2", std::nullopt, 3, true);
  CHECK(check_oriented_associativity(d).ok);
  CHECK_THROWS_AS(catalog_potential("I2", std::nullopt, 5), UsageError);
  CHECK(check_i2_odd_associativity(5, Rational(1, 3), {{1.3, 0.7}, {2.1, -0.4}, {0.6, 1.9}}).ok);
}

TEST_CASE("perturbed potentials") {
  // A two-dimensional commutative algebra with unit is always associative.
  VectorPotential v = catalog_potential("B2", Rational(1, 2));
  v.components[0] += fn(v, "u^4");
  CHECK(check_oriented_associativity(v).ok);
  CHECK(check_unity(v).ok);

  VectorPotential w = catalog_potential("B3", Rational(1, 2));
  w.components[1] += fn(w, "u2^3");
  CheckResult r = check_oriented_associativity(w);
  CHECK_FALSE(r.ok);
  CHECK_FALSE(r.residuals.empty());
  CHECK(check_unity(w).ok);

  VectorPotential x = catalog_potential("B2", Rational(1, 2));
  x.components[0] += fn(x, "u*v^2");
  CHECK_FALSE(check_unity(x).ok);
}

TEST_CASE("Frobenius condition selects special c") {
  VectorPotential f = catalog_potential("B2", Rational(-3, 4));
  FrobeniusResult r = check_frobenius(f, antidiagonal(2));
  CHECK(r.ok());
  REQUIRE(r.potential);
  CHECK(*r.potential == fn(f, "u*v^2/2 + u^5/240"));

  CHECK_FALSE(check_frobenius(catalog_potential("B2", Rational(0)), antidiagonal(2)).ok());
  CHECK(check_frobenius(catalog_potential("I2", Rational(0), 4), antidiagonal(2)).ok());
  for (Rational c : {Rational(-1), Rational(-1, 2), Rational(1), Rational(2)})
    CHECK_FALSE(check_frobenius(catalog_potential("B2", c), antidiagonal(2)).ok());
}

TEST_CASE("B2 hierarchy flows") {
  VectorPotential v = catalog_potential("B2", std::nullopt);
  EvolutionarySystem f10 = hierarchy_flow(v, 1, 0);
  ParseContext ctx = context_for(f10);
  REQUIRE(f10.currents);
  CHECK((*f10.currents)[0][0] == parse_expression("-2*(c+3/4)*u^2 + v", ctx));
  CHECK((*f10.currents)[1][0] == parse_expression("-2/3*(c+1)*(2*c+1)*u^3", ctx));
  EvolutionarySystem f20 = hierarchy_flow(v, 2, 0);
  CHECK((*f20.currents)[0][0] == parse_expression("u", ctx));
  CHECK((*f20.currents)[1][0] == parse_expression("v", ctx));
  EvolutionarySystem f21 = hierarchy_flow(v, 2, 1);
  CHECK((*f21.currents)[0][0] == parse_expression("-4/3*(c+3/4)*u^3 + u*v", ctx));
  CHECK((*f21.currents)[1][0] == parse_expression("-(c+1/2)*(c+1)*u^4 + v^2/2", ctx));
}

TEST_CASE("B2 hierarchy flows commute") {
  for (Rational c : {Rational(-3, 4), Rational(1, 3), Rational(2)}) {
    VectorPotential v = catalog_potential("B2", c);
    std::vector<EvolutionarySystem> flows;
    for (auto [p, l] : std::vector<std::pair<int, int>>{{1, 0}, {2, 0}, {1, 1}, {2, 1}, {1, 2}, {2, 2}})
      flows.push_back(hierarchy_flow(v, p, l));
    for (std::size_t i = 0; i < flows.size(); ++i)
      for (std::size_t j = i + 1; j < flows.size(); ++j) CHECK(flows_commute(flows[i], flows[j]));
  }
}

TEST_CASE("integrating a non-closed form fails") {
  VectorPotential v = catalog_potential("B2", Rational(0));
  CHECK_THROWS_AS(integrate_closed_form({fn(v, "v"), fn(v, "2*u")}, v.layout()), IncompatibilityError);
  CHECK(integrate_closed_form({fn(v, "v"), fn(v, "u")}, v.layout()) == fn(v, "u*v"));
}

TEST_CASE("Tsarev condition") {
  NameTable names;
  names.fields = {"r1", "r2", "r3"};
  ParseContext ctx;
  ctx.names = names;
  auto f = [&](const char* t) { return parse_function(t, ctx); };

  CheckResult cyclic = tsarev_check({names, {f("r2"), f("r3"), f("r1")}});
  CHECK_FALSE(cyclic.ok);
  CHECK(cyclic.residuals.size() == 3);
  CHECK(tsarev_check({names, {f("2*r1 + r2 + r3"), f("r1 + 2*r2 + r3"), f("r1 + r2 + 2*r3")}}).ok);
  CHECK(tsarev_check({names, {f("r1"), f("r2"), f("r3")}}).ok);
  CHECK_THROWS_AS(tsarev_check({names, {f("r1"), f("r1"), f("r3")}}), FormError);

  NameTable two;
  two.fields = {"r1", "r2"};
  ParseContext c2;
  c2.names = two;
  CHECK(tsarev_check({two, {parse_function("r2^3", c2), parse_function("r1*r2", c2)}}).ok);
}

TEST_CASE("Riemann invariants of B2 flows") {
  VectorPotential v = catalog_potential("B2", std::nullopt);
  EvolutionarySystem f = hierarchy_flow(v, 1, 0);
  RiemannCheckResult r = riemann_invariant_check(f, {fn(v, "-(c+1)*u^2 + v"), fn(v, "-(c+1/2)*u^2 + v")});
  CHECK(r.diagonal);
  REQUIRE(r.velocities.size() == 2);
  CHECK(r.velocities[0] == fn(v, "-2*(c+1)*u"));
  CHECK(r.velocities[1] == fn(v, "-(2*c+1)*u"));

  VectorPotential w = catalog_potential("B2", Rational(-1));
  RiemannCheckResult r2 = riemann_invariant_check(hierarchy_flow(w, 2, 1), {fn(w, "u^2/2 + v"), fn(w, "v")});
  CHECK(r2.diagonal);
  CHECK_FALSE(riemann_invariant_check(f, {fn(v, "u"), fn(v, "v")}).diagonal);
}
