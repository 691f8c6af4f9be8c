#pragma once

#include <random>

#include "miura/diffpoly.hpp"

namespace testing_support {

using namespace miura;

inline Poly random_poly(std::mt19937& rng, int nvars, int max_deg, int nterms) {
  std::uniform_int_distribution<int> coef(-9, 9), deg(0, max_deg), var(0, nvars - 1);
  std::vector<Term> terms;
  for (int t = 0; t < nterms; ++t) {
    Monomial m;
    int d = deg(rng);
    for (int k = 0; k < d; ++k) m = m * Monomial::variable(static_cast<std::size_t>(var(rng)));
    Rational q(coef(rng), 1 + std::abs(coef(rng)) % 3);
    q.canonicalize();
    terms.push_back({m, q});
  }
  return Poly::from_terms(std::move(terms));
}

inline DiffPoly random_diffpoly(std::mt19937& rng, Layout L, int max_order, int nterms) {
  std::uniform_int_distribution<int> field(0, L.nfields - 1), order(1, max_order), nj(0, 2);
  DiffPoly f(L);
  for (int t = 0; t < nterms; ++t) {
    JetMonomial m;
    int k = nj(rng);
    for (int j = 0; j < k; ++j) m = m * JetMonomial::single(field(rng), order(rng));
    Poly c = random_poly(rng, L.nvars(), 2, 2);
    f.add_term(m, RatFunc(c));
  }
  return f;
}

}  // namespace testing_support
