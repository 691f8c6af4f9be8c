#include "miura/systems.hpp"

#include "miura/errors.hpp"

#include <random>

namespace miura {

namespace {

void require_fields(std::size_t got, int want, const char* what) {
  if (static_cast<int>(got) != want) throw DimensionError(std::string(what) + ": expected " + std::to_string(want) +
                                                           " components, got " + std::to_string(got));
}

int common_order(const std::vector<EpsSeries>& v) {
  int n = v.empty() ? 0 : v[0].order();
  for (const auto& s : v) n = std::min(n, s.order());
  return n;
}

EpsSeries regraded(const EpsSeries& s, int offset, int order) {
  EpsSeries out(s.layout(), order, offset);
  for (int k = 0; k <= std::min(order, s.order()); ++k) out.set(k, s[k]);
  return out;
}

}  // namespace

EvolutionarySystem EvolutionarySystem::from_currents(std::string name, NameTable names, std::vector<EpsSeries> currents) {
  EvolutionarySystem sys;
  sys.name = std::move(name);
  sys.names = std::move(names);
  require_fields(currents.size(), sys.nfields(), "currents");
  sys.order = common_order(currents);
  std::vector<EpsSeries> cur;
  for (const auto& c : currents) {
    if (!(c.layout() == sys.layout()) && !c.is_zero()) throw DimensionError("current layout does not match the system");
    EpsSeries g = regraded(c, 0, sys.order);
    cur.push_back(g);
    sys.rhs.push_back(total_x_derivative(g));
  }
  sys.currents = std::move(cur);
  return sys;
}

EvolutionarySystem EvolutionarySystem::from_rhs(std::string name, NameTable names, std::vector<EpsSeries> rhs) {
  EvolutionarySystem sys;
  sys.name = std::move(name);
  sys.names = std::move(names);
  require_fields(rhs.size(), sys.nfields(), "right-hand sides");
  sys.order = common_order(rhs);
  for (const auto& r : rhs) sys.rhs.push_back(regraded(r, 1, sys.order));
  return sys;
}

RationalMatrix inverse(const RationalMatrix& m) {
  std::size_t n = m.size();
  RationalMatrix a = m, inv(n, std::vector<Rational>(n, Rational(0)));
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i].size() != n) throw DimensionError("matrix is not square");
    inv[i][i] = 1;
  }
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && sgn(a[piv][col]) == 0) ++piv;
    if (piv == n) throw FormError("matrix is singular");
    std::swap(a[piv], a[col]);
    std::swap(inv[piv], inv[col]);
    Rational p = a[col][col];
    for (std::size_t j = 0; j < n; ++j) {
      a[col][j] /= p;
      inv[col][j] /= p;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || sgn(a[r][col]) == 0) continue;
      Rational f = a[r][col];
      for (std::size_t j = 0; j < n; ++j) {
        a[r][j] -= f * a[col][j];
        inv[r][j] -= f * inv[col][j];
      }
    }
  }
  return inv;
}

MiuraTransform MiuraTransform::identity(Layout layout, int order) {
  std::vector<EpsSeries> tails(static_cast<std::size_t>(layout.nfields), EpsSeries(layout, order));
  RationalMatrix id(static_cast<std::size_t>(layout.nfields), std::vector<Rational>(static_cast<std::size_t>(layout.nfields)));
  for (int i = 0; i < layout.nfields; ++i) id[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1;
  MiuraTransform m = general(layout, order, id, std::vector<Rational>(static_cast<std::size_t>(layout.nfields)), tails);
  m.potentials = std::vector<EpsSeries>(static_cast<std::size_t>(layout.nfields), EpsSeries(layout, order, -1));
  return m;
}

MiuraTransform MiuraTransform::from_potentials(std::vector<EpsSeries> potentials, int order) {
  if (potentials.empty()) throw DimensionError("no potentials");
  Layout layout = potentials[0].layout();
  std::vector<EpsSeries> tails, pots;
  for (const auto& b : potentials) {
    EpsSeries p = regraded(b, -1, order);
    if (!p[0].is_zero()) throw FormError("potential has a nonzero eps^0 part");
    tails.push_back(total_x_derivative(p));
    pots.push_back(std::move(p));
  }
  MiuraTransform m = identity(layout, order);
  m.tails = std::move(tails);
  m.potentials = std::move(pots);
  return m;
}

MiuraTransform MiuraTransform::general(Layout layout, int order, RationalMatrix leading, std::vector<Rational> shift,
                                       std::vector<EpsSeries> tails) {
  require_fields(leading.size(), layout.nfields, "leading matrix");
  require_fields(shift.size(), layout.nfields, "shift");
  require_fields(tails.size(), layout.nfields, "tails");
  inverse(leading);
  MiuraTransform m;
  m.layout = layout;
  m.order = order;
  m.leading = std::move(leading);
  m.shift = std::move(shift);
  for (const auto& t : tails) {
    EpsSeries g = regraded(t, 0, order);
    if (!g[0].is_zero()) throw FormError("Miura tail has a nonzero eps^0 part");
    m.tails.push_back(std::move(g));
  }
  return m;
}

std::vector<EpsSeries> MiuraTransform::forward() const {
  std::vector<EpsSeries> out;
  for (int i = 0; i < nfields(); ++i) {
    DiffPoly lin(layout, RatFunc(shift[static_cast<std::size_t>(i)]));
    for (int j = 0; j < nfields(); ++j)
      lin += RatFunc(leading[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) * DiffPoly::jet(layout, j, 0);
    EpsSeries s = tails[static_cast<std::size_t>(i)];
    s.set(0, lin);
    out.push_back(std::move(s));
  }
  return out;
}

EpsSeries evolutionary_derivative(const EpsSeries& f, const std::vector<EpsSeries>& x) {
  int n = std::min(f.order(), common_order(x));
  std::optional<int> off;
  if (f.offset() && !x.empty() && x[0].offset()) off = *f.offset() + *x[0].offset();
  EpsSeries out(f.layout(), n, off);
  int max_order = 0;
  for (int k = 0; k <= n; ++k) max_order = std::max(max_order, f[k].max_order());
  if (max_order > 64) throw FormError("prolongation depth exceeds the supported bound");
  EpsSeries ft = series_truncate(f, n);
  for (std::size_t j = 0; j < x.size(); ++j) {
    EpsSeries dx = series_truncate(x[j], n);
    for (int s = 0; s <= max_order; ++s) {
      EpsSeries p = partial_jet_derivative(ft, {static_cast<int>(j), s});
      if (!p.is_zero()) out += p * dx;
      if (s < max_order) dx = total_x_derivative(dx);
    }
  }
  return out;
}

namespace {

std::vector<EpsSeries> substitute_all(const std::vector<EpsSeries>& fs, const std::vector<EpsSeries>& bindings) {
  std::vector<EpsSeries> out;
  for (const auto& f : fs) out.push_back(substitute(f, bindings));
  return out;
}

std::vector<EpsSeries> linear_combination(const RationalMatrix& m, const std::vector<EpsSeries>& v) {
  std::vector<EpsSeries> out;
  for (const auto& row : m) {
    EpsSeries s(v[0].layout(), common_order(v), v[0].offset());
    for (std::size_t j = 0; j < row.size(); ++j)
      if (sgn(row[j]) != 0) s += RatFunc(row[j]) * v[j];
    out.push_back(std::move(s));
  }
  return out;
}

bool tails_vanish(const MiuraTransform& m) {
  for (const auto& t : m.tails)
    if (!t.is_zero()) return false;
  return true;
}

std::optional<std::vector<EpsSeries>> potentials_of(const MiuraTransform& m) {
  if (m.potentials) return m.potentials;
  if (tails_vanish(m)) return std::vector<EpsSeries>(static_cast<std::size_t>(m.nfields()), EpsSeries(m.layout, m.order, -1));
  return std::nullopt;
}

// Same map viewed at order n (higher tails zero or dropped).
MiuraTransform resized(const MiuraTransform& m, int n) {
  MiuraTransform out = m;
  out.order = n;
  for (auto& t : out.tails) t = series_truncate(t, n);
  if (out.potentials)
    for (auto& p : *out.potentials) p = series_truncate(p, n);
  return out;
}

}  // namespace

EvolutionarySystem apply_miura(const EvolutionarySystem& sys, const MiuraTransform& given) {
  require_fields(given.tails.size(), sys.nfields(), "Miura transform");
  int n = sys.order;
  MiuraTransform m = resized(given, n);
  std::vector<EpsSeries> x;
  for (const auto& r : sys.rhs) x.push_back(series_truncate(r, n));
  std::vector<EpsSeries> inv = invert_miura(m).forward();

  std::vector<EpsSeries> wt;
  for (const auto& w : m.forward()) wt.push_back(evolutionary_derivative(series_truncate(w, n), x));
  std::vector<EpsSeries> rhs = substitute_all(wt, inv);

  auto pots = potentials_of(m);
  if (sys.currents && pots) {
    std::vector<EpsSeries> cur;
    std::vector<EpsSeries> base;
    for (const auto& c : *sys.currents) base.push_back(series_truncate(c, n));
    std::vector<EpsSeries> lin = linear_combination(m.leading, base);
    for (int i = 0; i < sys.nfields(); ++i) {
      EpsSeries j = lin[static_cast<std::size_t>(i)];
      j += evolutionary_derivative(series_truncate((*pots)[static_cast<std::size_t>(i)], n), x);
      cur.push_back(j);
    }
    EvolutionarySystem out = EvolutionarySystem::from_currents(sys.name, sys.names, substitute_all(cur, inv));
    out.fixed_params = sys.fixed_params;
    for (int i = 0; i < sys.nfields(); ++i)
      if (out.rhs[static_cast<std::size_t>(i)] != series_truncate(rhs[static_cast<std::size_t>(i)], out.order))
        throw Error("internal inconsistency: transformed currents do not reproduce the transformed flow");
    return out;
  }
  EvolutionarySystem out = EvolutionarySystem::from_rhs(sys.name, sys.names, rhs);
  out.fixed_params = sys.fixed_params;
  return out;
}

MiuraTransform invert_miura(const MiuraTransform& m) {
  RationalMatrix linv = inverse(m.leading);
  std::vector<Rational> shift(m.shift.size());
  for (std::size_t i = 0; i < linv.size(); ++i)
    for (std::size_t j = 0; j < linv.size(); ++j) shift[i] -= linv[i][j] * m.shift[j];
  MiuraTransform base_map = MiuraTransform::general(m.layout, m.order, linv, shift,
                                                    std::vector<EpsSeries>(m.tails.size(), EpsSeries(m.layout, m.order)));
  std::vector<EpsSeries> base = base_map.forward();
  std::vector<EpsSeries> g = base;
  if (!tails_vanish(m)) {
    for (int it = 0; it < m.order; ++it) {
      std::vector<EpsSeries> corr = linear_combination(linv, substitute_all(m.tails, g));
      for (std::size_t i = 0; i < g.size(); ++i) g[i] = base[i] - corr[i];
    }
  }
  std::vector<EpsSeries> tails;
  for (std::size_t i = 0; i < g.size(); ++i) {
    EpsSeries t = g[i];
    t.set(0, DiffPoly(m.layout));
    tails.push_back(std::move(t));
  }
  MiuraTransform out = MiuraTransform::general(m.layout, m.order, linv, shift, tails);
  if (auto pots = potentials_of(m)) {
    std::vector<EpsSeries> p = linear_combination(linv, substitute_all(*pots, g));
    for (auto& s : p) s = with_offset(-s, -1);
    out.potentials = std::move(p);
  }
  return out;
}

MiuraTransform compose(const MiuraTransform& a, const MiuraTransform& b) {
  int n = std::min(a.order, b.order);
  std::vector<EpsSeries> fa = a.forward();
  std::vector<EpsSeries> w = substitute_all(b.forward(), fa);
  std::size_t nf = a.leading.size();
  RationalMatrix lead(nf, std::vector<Rational>(nf));
  std::vector<Rational> shift(nf);
  for (std::size_t i = 0; i < nf; ++i) {
    shift[i] = b.shift[i];
    for (std::size_t k = 0; k < nf; ++k) {
      shift[i] += b.leading[i][k] * a.shift[k];
      for (std::size_t j = 0; j < nf; ++j) lead[i][j] += b.leading[i][k] * a.leading[k][j];
    }
  }
  std::vector<EpsSeries> tails;
  for (auto& s : w) {
    EpsSeries t = series_truncate(s, n);
    t.set(0, DiffPoly(a.layout));
    tails.push_back(std::move(t));
  }
  MiuraTransform out = MiuraTransform::general(a.layout, n, lead, shift, tails);
  auto pa = potentials_of(a), pb = potentials_of(b);
  if (pa && pb) {
    std::vector<EpsSeries> p = linear_combination(b.leading, *pa);
    std::vector<EpsSeries> q = substitute_all(*pb, fa);
    for (std::size_t i = 0; i < nf; ++i) p[i] = series_truncate(with_offset(p[i] + q[i], -1), n);
    out.potentials = std::move(p);
  }
  return out;
}

FormList bracket_flat(const FormList& alpha, const FormList& beta) {
  require_fields(beta.size(), static_cast<int>(alpha.size()), "bracket arguments");
  std::vector<EpsSeries> xa, xb;
  for (const auto& a : alpha) xa.push_back(total_x_derivative(a));
  for (const auto& b : beta) xb.push_back(total_x_derivative(b));
  FormList out;
  for (std::size_t i = 0; i < alpha.size(); ++i)
    out.push_back(evolutionary_derivative(alpha[i], xb) - evolutionary_derivative(beta[i], xa));
  return out;
}

namespace {

/// V^k = g^{kl} D_x f_l + Γ^{kl}_m u^m_x f_l.
std::vector<EpsSeries> hamiltonian_vector(const FormList& f, const RatMatrix& g,
                                          const std::vector<std::vector<std::vector<RatFunc>>>& gup) {
  std::size_t n = f.size();
  Layout L = f[0].layout();
  std::vector<EpsSeries> out;
  for (std::size_t k = 0; k < n; ++k) {
    EpsSeries v(L, common_order(f), std::nullopt);
    for (std::size_t l = 0; l < n; ++l) {
      if (!g[k][l].is_zero()) v += g[k][l] * total_x_derivative(f[l]);
      DiffPoly coef(L);
      for (std::size_t m = 0; m < n; ++m)
        if (!gup[k][l][m].is_zero()) coef += gup[k][l][m] * DiffPoly::jet(L, static_cast<int>(m), 1);
      if (!coef.is_zero()) v += EpsSeries::constant(coef, v.order(), std::nullopt) * f[l];
    }
    out.push_back(with_offset(v, f[0].offset() ? std::optional<int>(*f[0].offset() + 1) : std::nullopt));
  }
  return out;
}

}  // namespace

FormList bracket_general(const FormList& alpha, const FormList& beta, const FlatConnectionData& conn) {
  std::size_t n = alpha.size();
  require_fields(beta.size(), static_cast<int>(n), "bracket arguments");
  require_fields(conn.g.size(), static_cast<int>(n), "metric");
  require_fields(conn.gamma.size(), static_cast<int>(n), "Christoffel symbols");
  Layout L = alpha[0].layout();
  // Γ^{ij}_k = −g^{il} Γ^j_{lk}
  std::vector<std::vector<std::vector<RatFunc>>> gup(n, std::vector<std::vector<RatFunc>>(n, std::vector<RatFunc>(n)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l)
          if (!conn.g[i][l].is_zero() && !conn.gamma[j][l][k].is_zero()) gup[i][j][k] -= conn.g[i][l] * conn.gamma[j][l][k];

  std::vector<EpsSeries> va = hamiltonian_vector(alpha, conn.g, gup);
  std::vector<EpsSeries> vb = hamiltonian_vector(beta, conn.g, gup);
  int order = std::min(common_order(alpha), common_order(beta));
  FormList out;
  for (std::size_t i = 0; i < n; ++i) {
    EpsSeries r = evolutionary_derivative(alpha[i], vb) - evolutionary_derivative(beta[i], va);
    r = series_truncate(with_offset(r, std::nullopt), order);
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t l = 0; l < n; ++l) {
        if (!gup[l][k][i].is_zero()) {
          EpsSeries t = alpha[k] * total_x_derivative(beta[l]) - beta[k] * total_x_derivative(alpha[l]);
          r += gup[l][k][i] * with_offset(t, std::nullopt);
        }
        DiffPoly coef(L);
        for (std::size_t m = 0; m < n; ++m) {
          RatFunc c;
          for (std::size_t s = 0; s < n; ++s)
            c += conn.gamma[k][i][s] * gup[s][l][m] - conn.gamma[l][i][s] * gup[s][k][m];
          if (!c.is_zero()) coef += c * DiffPoly::jet(L, static_cast<int>(m), 1);
        }
        if (!coef.is_zero()) r -= with_offset(EpsSeries::constant(coef, order, std::nullopt) * alpha[k] * beta[l], std::nullopt);
      }
    }
    out.push_back(r);
  }
  return out;
}

FormList commutator_direct(const EvolutionarySystem& a, const EvolutionarySystem& b) {
  require_fields(b.rhs.size(), a.nfields(), "commutator arguments");
  FormList out;
  for (int i = 0; i < a.nfields(); ++i)
    out.push_back(evolutionary_derivative(a.rhs[static_cast<std::size_t>(i)], b.rhs) -
                  evolutionary_derivative(b.rhs[static_cast<std::size_t>(i)], a.rhs));
  return out;
}

bool all_zero(const FormList& forms) {
  for (const auto& f : forms)
    if (!f.is_zero()) return false;
  return true;
}

std::vector<RatMatrix> quasilinear_part(const EvolutionarySystem& sys) {
  int n = sys.nfields();
  std::vector<RatMatrix> out;
  for (int k = 0; k <= sys.order; ++k) {
    RatMatrix m(static_cast<std::size_t>(n), std::vector<RatFunc>(static_cast<std::size_t>(n)));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
            sys.rhs[static_cast<std::size_t>(i)][k].coefficient(JetMonomial::single(j, k + 1));
    out.push_back(std::move(m));
  }
  return out;
}

MiuraTransform random_miura(Layout layout, int order, int max_degree, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> coef(-3, 3), field(0, layout.nfields - 1), deg(0, max_degree), nterms(1, 3);
  auto random_coefficient = [&] {
    Poly p;
    for (int t = nterms(rng); t > 0; --t) {
      Monomial m;
      for (int d = deg(rng); d > 0; --d) m = m * Monomial::variable(static_cast<std::size_t>(layout.field_var(field(rng))));
      p += Poly::from_terms({{m, Rational(coef(rng))}});
    }
    return RatFunc(p);
  };
  // Jet monomials of differential degree k: one derivative of order k, or
  // (for k = 2) a product of two first derivatives.
  auto random_jet = [&](int k) {
    if (k == 2 && coef(rng) > 0) return JetMonomial::single(field(rng), 1) * JetMonomial::single(field(rng), 1);
    return JetMonomial::single(field(rng), k);
  };
  std::vector<EpsSeries> tails;
  for (int i = 0; i < layout.nfields; ++i) {
    EpsSeries tail(layout, order, 0);
    for (int k = 1; k <= order; ++k) {
      DiffPoly f(layout);
      for (int t = nterms(rng); t > 0; --t) f.add_term(random_jet(k), random_coefficient());
      tail.set(k, f);
    }
    tails.push_back(std::move(tail));
  }
  RationalMatrix id(static_cast<std::size_t>(layout.nfields), std::vector<Rational>(static_cast<std::size_t>(layout.nfields)));
  for (std::size_t i = 0; i < id.size(); ++i) id[i][i] = 1;
  return MiuraTransform::general(layout, order, id, std::vector<Rational>(id.size()), tails);
}

}  // namespace miura
