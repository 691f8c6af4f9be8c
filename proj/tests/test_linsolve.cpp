#include <doctest.h>

#include <random>

#include "miura/linsolve.hpp"

using namespace miura;

namespace {

Rational dot(const SparseRow& row, const std::vector<Rational>& x) {
  Rational s = 0;
  for (const auto& [j, a] : row) s += a * x[j];
  return s;
}

}  // namespace

TEST_CASE("small consistent system") {
  // x0 + x1 = 3, x0 - x1 = 1, x2 free
  SparseLinearSystem sys(3);
  sys.add_equation({{0, 1}, {1, 1}}, -3);
  sys.add_equation({{0, 1}, {1, -1}}, -1);
  CHECK(sys.consistent());
  CHECK(sys.rank() == 2);
  auto x = sys.solve();
  REQUIRE(x);
  CHECK((*x)[0] == 2);
  CHECK((*x)[1] == 1);
  CHECK((*x)[2] == 0);
  auto ns = sys.nullspace();
  REQUIRE(ns.size() == 1);
  CHECK(ns[0][0] == 0);
  CHECK(ns[0][1] == 0);
  CHECK(ns[0][2] != 0);
}

TEST_CASE("inconsistent and redundant equations") {
  SparseLinearSystem sys(2);
  sys.add_equation({{0, 2}, {1, 4}}, -2);
  sys.add_equation({{0, 1}, {1, 2}}, -1);
  CHECK(sys.consistent());
  CHECK(sys.rank() == 1);
  sys.add_equation({{0, Rational(1, 2)}, {1, 1}}, 0);
  CHECK_FALSE(sys.consistent());
  CHECK_FALSE(sys.solve());
}

TEST_CASE("random sparse systems") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> coef(-5, 5), pick(0, 11);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 12;
    std::vector<Rational> truth(n);
    for (auto& t : truth) t = Rational(coef(rng), 1 + std::abs(coef(rng)));
    for (auto& t : truth) t.canonicalize();
    std::vector<SparseRow> rows;
    SparseLinearSystem sys(n);
    for (int e = 0; e < 9; ++e) {
      SparseRow row;
      for (int k = 0; k < 4; ++k) {
        int c = coef(rng);
        if (c != 0) row[static_cast<std::size_t>(pick(rng))] = c;
      }
      rows.push_back(row);
      sys.add_equation(row, -dot(row, truth));
    }
    REQUIRE(sys.consistent());
    auto x = sys.solve();
    REQUIRE(x);
    for (const auto& row : rows) CHECK(dot(row, *x) == dot(row, truth));
    auto ns = sys.nullspace();
    CHECK(ns.size() == n - sys.rank());
    for (const auto& v : ns)
      for (const auto& row : rows) CHECK(dot(row, v) == 0);
  }
}
