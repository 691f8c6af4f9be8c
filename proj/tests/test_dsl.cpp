#include <doctest.h>

#include "miura/dsl.hpp"
#include "miura/errors.hpp"

using namespace miura;

namespace {

ParseContext b2_context() {
  ParseContext ctx;
  ctx.names.params = {"c"};
  ctx.names.fields = {"u", "v"};
  ctx.order = 2;
  return ctx;
}

}  // namespace

TEST_CASE("expressions parse to canonical differential polynomials") {
  ParseContext ctx = b2_context();
  DiffPoly a = parse_expression("v - 2*(c+3/4)*u^2", ctx);
  DiffPoly b = parse_expression("-2*c*u^2 - 3/2*u^2 + v", ctx);
  CHECK(a == b);
  CHECK(parse_expression("D(u,1)", ctx) == DiffPoly::jet(ctx.names.layout(), 0, 1));
  CHECK(parse_expression("u*D(v,2) + D(u,1)*D(v,1)", ctx) == total_x_derivative(parse_expression("u*D(v,1)", ctx)));
  CHECK(parse_expression("diff(u^3*v, u, v)", ctx) == parse_expression("3*u^2", ctx));
  CHECK(parse_expression("u^(2*2-1)", ctx) == parse_expression("u*u*u", ctx));
  CHECK(parse_expression("(u^2 - v^2)/(u + v)", ctx) == parse_expression("u - v", ctx));
}

TEST_CASE("parse errors carry positions") {
  ParseContext ctx = b2_context();
  try {
    parse_expression("u + w", ctx);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 1);
    CHECK(e.column() == 5);
  }
  CHECK_THROWS_AS(parse_expression("u + 0.5", ctx), ParseError);
  CHECK_THROWS_AS(parse_expression("u + ", ctx), ParseError);
  CHECK_THROWS_AS(parse_expression("u / D(u,1)", ctx), ParseError);
  CHECK_THROWS_AS(parse_expression("u^c", ctx), ParseError);
}

TEST_CASE("plugins") {
  Plugin p = parse_plugin("F1", "s^2 - 3*s + 1/2");
  CHECK(p.arg == "s");
  CHECK(p.coeffs.size() == 3);
  CHECK(p.apply(RatFunc(Rational(2))) == RatFunc(Rational(-3, 2)));
  CHECK(p.derivative().body() == "2*s - 3");
  CHECK_THROWS_AS(parse_plugin("F", "x*y"), ParseError);
}

TEST_CASE("documents round-trip through canonical printing") {
  const char* text = R"(# deformed system
system demo
vars u v
param c = -3/4
param k
eps_order 2
func F1(z) = z^2
let r = u^2/4 + v
current u = v - 2*(c+3/4)*u^2 + eps^2*(F1(r)*D(u,2)
    + k*u*D(v,1)^2/(u^2+v))
current v = u^3/12 + eps*k*D(u,1)
)";
  Document doc = parse_document(text);
  CHECK(doc.names.params == std::vector<std::string>{"k"});
  std::string printed = print_document(doc);
  CHECK(print_document(parse_document(printed)) == printed);
  EvolutionarySystem sys = to_system(doc);
  CHECK(sys.order == 2);
  CHECK(sys.fixed_params.size() == 1);
  CHECK(to_system(parse_document(print_document(from_system(sys)))).rhs == sys.rhs);
}

TEST_CASE("documents reject grading violations and unknown statements") {
  CHECK_THROWS_AS(to_system(parse_document("system s\nvars u\neps_order 1\ncurrent u = D(u,1)\n")), FormError);
  CHECK_THROWS_AS(parse_document("system s\nvars u\nfoo u\n"), ParseError);
  CHECK_THROWS_AS(parse_document("system s\nvars u\ncurrent w = u\n"), ParseError);
}
