#include "miura/invariants.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "miura/errors.hpp"

namespace miura {

namespace {

bool is_zero_value(const RatFunc& x) { return x.is_zero(); }
bool is_zero_value(const Rational& x) { return sgn(x) == 0; }
bool is_zero_value(double x) { return x == 0.0; }

/// Truncated power series in z over a field K.
template <typename K>
using Series = std::vector<K>;

template <typename K>
Series<K> mul(const Series<K>& a, const Series<K>& b) {
  std::size_t n = a.size();
  Series<K> r(n, K(0));
  for (std::size_t i = 0; i < n; ++i) {
    if (is_zero_value(a[i])) continue;
    for (std::size_t j = 0; i + j < n; ++j)
      if (!is_zero_value(b[j])) r[i + j] += a[i] * b[j];
  }
  return r;
}

template <typename K>
Series<K> sub(Series<K> a, const Series<K>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
  return a;
}

template <typename K>
Series<K> div(const Series<K>& a, const Series<K>& b) {
  std::size_t n = a.size();
  Series<K> q(n, K(0));
  K inv = K(1) / b[0];
  for (std::size_t k = 0; k < n; ++k) {
    K s = a[k];
    for (std::size_t j = 1; j <= k; ++j)
      if (!is_zero_value(b[j])) s -= b[j] * q[k - j];
    q[k] = s * inv;
  }
  return q;
}

template <typename K>
using SeriesMatrix = std::vector<std::vector<Series<K>>>;

template <typename K>
Series<K> det(const SeriesMatrix<K>& m, std::vector<std::size_t>& rows, std::size_t col) {
  std::size_t n = m.size();
  std::size_t len = m[0][0].size();
  if (col == n) {
    Series<K> one(len, K(0));
    one[0] = K(1);
    return one;
  }
  Series<K> total(len, K(0));
  int sign = 1;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    std::size_t r = rows[k];
    const Series<K>& e = m[r][col];
    bool zero = true;
    for (const auto& x : e) zero = zero && is_zero_value(x);
    if (!zero) {
      std::vector<std::size_t> rest = rows;
      rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(k));
      Series<K> minor = mul(e, det(m, rest, col + 1));
      for (std::size_t i = 0; i < len; ++i) {
        if (sign > 0) total[i] += minor[i];
        else total[i] -= minor[i];
      }
    }
    sign = -sign;
  }
  return total;
}

template <typename K>
Series<K> det(const SeriesMatrix<K>& m) {
  std::vector<std::size_t> rows(m.size());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  return det(m, rows, 0);
}

template <typename K>
SeriesMatrix<K> shifted(const SeriesMatrix<K>& m, const Series<K>& lambda) {
  SeriesMatrix<K> r = m;
  for (std::size_t i = 0; i < m.size(); ++i) r[i][i] = sub(r[i][i], lambda);
  return r;
}

/// d/dλ det(M − λI) = −Σ_i det of the (i,i) minor of (M − λI).
template <typename K>
Series<K> det_derivative(const SeriesMatrix<K>& a) {
  std::size_t n = a.size();
  std::size_t len = a[0][0].size();
  Series<K> total(len, K(0));
  for (std::size_t i = 0; i < n; ++i) {
    SeriesMatrix<K> minor;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == i) continue;
      std::vector<Series<K>> row;
      for (std::size_t c = 0; c < n; ++c)
        if (c != i) row.push_back(a[r][c]);
      minor.push_back(std::move(row));
    }
    Series<K> d;
    if (minor.empty()) {
      d.assign(len, K(0));
      d[0] = K(1);
    } else {
      d = det(minor);
    }
    total = sub(total, d);
  }
  return total;
}

/// Newton iteration for the root of det(M(z) − λ I) starting at λ0.
template <typename K>
Series<K> newton_root(const SeriesMatrix<K>& m, const K& lambda0) {
  std::size_t len = m[0][0].size();
  Series<K> lambda(len, K(0));
  lambda[0] = lambda0;
  for (std::size_t it = 0; it <= len + 1; ++it) {
    SeriesMatrix<K> a = shifted(m, lambda);
    Series<K> p = det(a);
    bool done = true;
    for (const auto& x : p) done = done && is_zero_value(x);
    if (done) break;
    Series<K> dp = det_derivative(a);
    if (is_zero_value(dp[0])) throw RepeatedRootError("eigenvalue of the dispersionless symbol is not simple");
    lambda = sub(lambda, div(p, dp));
  }
  return lambda;
}

template <typename K, typename F>
SeriesMatrix<K> symbol_matrix(const std::vector<RatMatrix>& q, F convert) {
  std::size_t n = q[0].size();
  std::size_t len = q.size();
  SeriesMatrix<K> m(n, std::vector<Series<K>>(n, Series<K>(len, K(0))));
  for (std::size_t k = 0; k < len; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) m[i][j][k] = convert(q[k][i][j]);
  return m;
}

std::optional<RatFunc> sqrt_exact(const RatFunc& f) {
  auto n = sqrt_exact(f.num());
  auto d = sqrt_exact(f.den());
  if (!n || !d) return std::nullopt;
  return RatFunc(*n, *d);
}

template <typename K, typename Sqrt>
std::vector<K> leading_roots(const std::vector<std::vector<K>>& a, Sqrt sqrt_fn) {
  std::size_t n = a.size();
  if (n == 1) return {a[0][0]};
  bool upper = true, lower = true;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i > j && !is_zero_value(a[i][j])) upper = false;
      if (i < j && !is_zero_value(a[i][j])) lower = false;
    }
  if (upper || lower) {
    std::vector<K> roots;
    for (std::size_t i = 0; i < n; ++i) roots.push_back(a[i][i]);
    return roots;
  }
  if (n == 2) {
    K tr = a[0][0] + a[1][1];
    K dt = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    K disc = tr * tr - K(4) * dt;
    auto s = sqrt_fn(disc);
    if (!s) throw FormError("eigenvalues of the dispersionless symbol are not rational; use numeric mode");
    K half = K(1) / K(2);
    return {(tr + *s) * half, (tr - *s) * half};
  }
  throw FormError("exact eigenvalues are only available for 2x2 or triangular symbols; use numeric mode");
}

template <typename K>
void check_distinct(const std::vector<K>& roots) {
  for (std::size_t i = 0; i < roots.size(); ++i)
    for (std::size_t j = i + 1; j < roots.size(); ++j)
      if (is_zero_value(K(roots[i] - roots[j]))) throw RepeatedRootError("repeated eigenvalue in the dispersionless limit");
}

}  // namespace

InvariantSeries miura_invariant_series(const EvolutionarySystem& sys, Mode mode, std::span<const Rational> point) {
  std::vector<RatMatrix> q = quasilinear_part(sys);
  InvariantSeries out;
  out.mode = mode;
  out.order = sys.order;
  std::size_t n = static_cast<std::size_t>(sys.nfields());
  if (mode == Mode::Exact) {
    SeriesMatrix<RatFunc> m = symbol_matrix<RatFunc>(q, [](const RatFunc& f) { return f; });
    std::vector<std::vector<RatFunc>> a0(n, std::vector<RatFunc>(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) a0[i][j] = m[i][j][0];
    std::vector<RatFunc> roots = leading_roots(a0, [](const RatFunc& d) { return sqrt_exact(d); });
    check_distinct(roots);
    for (const auto& r : roots) out.exact.push_back(newton_root(m, r));
    for (const auto& res : invariant_residual(sys, out))
      for (const auto& c : res)
        if (!c.is_zero()) throw Error("internal error: invariant series does not annihilate the characteristic polynomial");
    return out;
  }

  Layout L = sys.layout();
  if (L.nparams > 0) throw UsageError("numeric mode needs all parameters fixed");
  if (static_cast<int>(point.size()) != L.nfields) throw UsageError("sample point must give one value per field");
  std::vector<double> pt;
  for (const auto& x : point) pt.push_back(x.get_d());
  out.point = pt;
  SeriesMatrix<double> m = symbol_matrix<double>(q, [&](const RatFunc& f) { return f.evaluate_double(pt); });
  Eigen::MatrixXd a0(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  double scale = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      a0(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m[i][j][0];
      scale = std::max(scale, std::abs(m[i][j][0]));
    }
  Eigen::EigenSolver<Eigen::MatrixXd> es(a0);
  std::vector<double> roots;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    auto ev = es.eigenvalues()(i);
    if (std::abs(ev.imag()) > 1e-12 * std::max(1.0, scale)) throw FormError("complex eigenvalue at the sample point");
    roots.push_back(ev.real());
  }
  std::sort(roots.begin(), roots.end(), std::greater<>());
  for (std::size_t i = 0; i + 1 < roots.size(); ++i)
    if (std::abs(roots[i] - roots[i + 1]) <= 1e-9 * std::max(1.0, scale))
      throw RepeatedRootError("eigenvalue collision at the sample point");
  for (double r : roots) {
    // Polish the leading root, then run the series iteration.
    double lam = r;
    for (int it = 0; it < 3; ++it) {
      Series<double> l0(m[0][0].size(), 0.0);
      l0[0] = lam;
      SeriesMatrix<double> s = shifted(m, l0);
      double p = det(s)[0];
      double dp = det_derivative(s)[0];
      if (dp == 0) break;
      lam -= p / dp;
    }
    Series<double> series = newton_root(m, lam);
    SeriesMatrix<double> s = shifted(m, series);
    Series<double> res = det(s);
    double denom = std::max(1.0, std::pow(scale, static_cast<double>(n)));
    for (double x : res) out.max_relative_residual = std::max(out.max_relative_residual, std::abs(x) / denom);
    out.numeric.push_back(series);
  }
  return out;
}

std::vector<std::vector<RatFunc>> invariant_residual(const EvolutionarySystem& sys, const InvariantSeries& inv) {
  std::vector<RatMatrix> q = quasilinear_part(sys);
  SeriesMatrix<RatFunc> m = symbol_matrix<RatFunc>(q, [](const RatFunc& f) { return f; });
  std::vector<std::vector<RatFunc>> out;
  for (const auto& lam : inv.exact) out.push_back(det(shifted(m, lam)));
  return out;
}

std::vector<std::vector<GaussianRational>> dispersion_relations(const EvolutionarySystem& sys, std::span<const Rational> u0,
                                                                int kmax_order) {
  Layout L = sys.layout();
  if (L.nparams > 0) throw UsageError("dispersion relations need all parameters fixed");
  if (static_cast<int>(u0.size()) != L.nfields) throw UsageError("constant state must give one value per field");
  std::vector<Rational> pt(u0.begin(), u0.end());
  std::vector<RatMatrix> q = quasilinear_part(sys);
  SeriesMatrix<Rational> m = symbol_matrix<Rational>(q, [&](const RatFunc& f) { return f.evaluate(pt); });
  std::size_t n = m.size();
  std::vector<std::vector<Rational>> a0(n, std::vector<Rational>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a0[i][j] = m[i][j][0];
  std::vector<Rational> roots = leading_roots(a0, [](const Rational& d) { return sqrt_exact(d); });
  check_distinct(roots);
  std::vector<std::vector<GaussianRational>> out;
  for (const auto& r : roots) {
    Series<Rational> lam = newton_root(m, r);
    // ω(k) = −k Σ_j λ_j (ik)^j
    std::vector<GaussianRational> omega(static_cast<std::size_t>(kmax_order + 1));
    for (std::size_t j = 0; j < lam.size(); ++j) {
      std::size_t power = j + 1;
      if (power > static_cast<std::size_t>(kmax_order)) break;
      Rational c = -lam[j];
      switch (j % 4) {
        case 0: omega[power].re += c; break;
        case 1: omega[power].im += c; break;
        case 2: omega[power].re -= c; break;
        default: omega[power].im -= c; break;
      }
    }
    out.push_back(std::move(omega));
  }
  return out;
}

std::string to_string(const std::vector<GaussianRational>& p) {
  std::string s;
  for (std::size_t k = p.size(); k-- > 0;) {
    const auto& c = p[k];
    if (sgn(c.re) == 0 && sgn(c.im) == 0) continue;
    std::string coef;
    if (sgn(c.im) == 0) {
      coef = to_string(c.re);
    } else if (sgn(c.re) == 0) {
      coef = to_string(c.im) + "*i";
    } else {
      coef = "(" + to_string(c.re) + " + " + to_string(c.im) + "*i)";
    }
    if (!s.empty()) {
      if (coef.front() == '-') {
        s += " - ";
        coef.erase(0, 1);
      } else {
        s += " + ";
      }
    }
    if (k == 0) {
      s += coef;
      continue;
    }
    if (coef == "-1") {
      s += "-";
    } else if (coef != "1") {
      s += coef + "*";
    }
    s += "k";
    if (k >= 2) s += "^" + std::to_string(k);
  }
  return s.empty() ? "0" : s;
}

}  // namespace miura
