#include "miura/fmanifold.hpp"

#include <cmath>

#include "miura/dsl.hpp"
#include "miura/errors.hpp"

namespace miura {

StructureConstants structure_constants(const VectorPotential& v) {
  int n = v.dimension();
  StructureConstants c(static_cast<std::size_t>(n), RatMatrix(static_cast<std::size_t>(n), std::vector<RatFunc>(static_cast<std::size_t>(n))));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      RatFunc dj = v.components[static_cast<std::size_t>(i)].derivative(v.var(j));
      for (int k = j; k < n; ++k) {
        RatFunc d = dj.derivative(v.var(k));
        c[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] = d;
        c[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)][static_cast<std::size_t>(j)] = d;
      }
    }
  }
  return c;
}

namespace {

void record(CheckResult& r, std::string label, const RatFunc& residual) {
  if (residual.is_zero()) return;
  r.ok = false;
  r.residuals.emplace_back(std::move(label), residual);
}

std::string idx(std::initializer_list<int> ids) {
  std::string s = "(";
  bool first = true;
  for (int i : ids) {
    if (!first) s += ",";
    s += std::to_string(i + 1);
    first = false;
  }
  return s + ")";
}

}  // namespace

CheckResult check_unity(const VectorPotential& v) {
  CheckResult r;
  auto c = structure_constants(v);
  int n = v.dimension();
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      record(r, "unity" + idx({i, k}),
             c[static_cast<std::size_t>(i)][static_cast<std::size_t>(v.unity)][static_cast<std::size_t>(k)] - RatFunc(i == k ? 1 : 0));
  return r;
}

CheckResult check_oriented_associativity(const VectorPotential& v) {
  CheckResult r;
  auto c = structure_constants(v);
  auto n = static_cast<std::size_t>(v.dimension());
  // c^i_{jl} c^l_{km} − c^i_{kl} c^l_{jm}
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k)
        for (std::size_t m = 0; m < n; ++m) {
          RatFunc s;
          for (std::size_t l = 0; l < n; ++l) s += c[i][j][l] * c[l][k][m] - c[i][k][l] * c[l][j][m];
          record(r, "associativity" + idx({int(i), int(j), int(k), int(m)}), s);
        }
  return r;
}

RatFunc integrate_closed_form(const std::vector<RatFunc>& w, Layout layout) {
  int n = layout.nfields;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      RatFunc d = w[static_cast<std::size_t>(a)].derivative(static_cast<std::size_t>(layout.field_var(b))) -
                  w[static_cast<std::size_t>(b)].derivative(static_cast<std::size_t>(layout.field_var(a)));
      if (!d.is_zero()) throw IncompatibilityError("1-form is not closed: mixed partials disagree");
    }
  std::uint32_t field_mask = 0;
  for (int a = 0; a < n; ++a) field_mask |= 1u << layout.field_var(a);
  RatFunc result;
  for (int j = 0; j < n; ++j) {
    const RatFunc& f = w[static_cast<std::size_t>(j)];
    if (f.den().support() & field_mask) throw FormError("1-form has a denominator depending on the coordinates");
    Monomial uj = Monomial::variable(static_cast<std::size_t>(layout.field_var(j)));
    std::vector<Term> terms;
    for (const auto& t : f.num().terms()) {
      unsigned d = 0;
      for (int a = 0; a < n; ++a) d += t.mono.exp[static_cast<std::size_t>(layout.field_var(a))];
      terms.push_back({t.mono * uj, t.coef / (d + 1)});
    }
    result += RatFunc(Poly::from_terms(std::move(terms)), f.den());
  }
  return result;
}

FrobeniusResult check_frobenius(const VectorPotential& v, const RationalMatrix& eta) {
  FrobeniusResult res;
  auto n = static_cast<std::size_t>(v.dimension());
  if (eta.size() != n) throw DimensionError("metric dimension mismatch");
  std::vector<RatFunc> lowered(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t l = 0; l < n; ++l)
      if (sgn(eta[i][l]) != 0) lowered[i] += v.components[l].scaled(eta[i][l]);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      record(res.closedness, "closedness" + idx({int(i), int(j)}),
             lowered[i].derivative(v.var(int(j))) - lowered[j].derivative(v.var(int(i))));
  auto c = structure_constants(v);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        RatFunc s;
        for (std::size_t l = 0; l < n; ++l) s += RatFunc(eta[i][l]) * c[l][j][k] - RatFunc(eta[j][l]) * c[l][i][k];
        record(res.invariance, "invariance" + idx({int(i), int(j), int(k)}), s);
      }
  if (res.closedness.ok) res.potential = integrate_closed_form(lowered, v.layout());
  return res;
}

std::vector<RatFunc> hierarchy_field(const VectorPotential& v, int p, int l) {
  int n = v.dimension();
  if (p < 1 || p > n) throw UsageError("primary index out of range");
  if (l < 0) throw UsageError("negative hierarchy level");
  std::vector<RatFunc> x(static_cast<std::size_t>(n));
  x[static_cast<std::size_t>(p - 1)] = RatFunc(1);
  auto c = structure_constants(v);
  for (int level = 0; level < l; ++level) {
    std::vector<RatFunc> next;
    for (int i = 0; i < n; ++i) {
      std::vector<RatFunc> w(static_cast<std::size_t>(n));
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          w[static_cast<std::size_t>(j)] +=
              c[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(k)];
      RatFunc xi = integrate_closed_form(w, v.layout());
      for (int j = 0; j < n; ++j)
        if (xi.derivative(v.var(j)) != w[static_cast<std::size_t>(j)])
          throw IncompatibilityError("recursion is not reproduced by the integrated field");
      next.push_back(std::move(xi));
    }
    x = std::move(next);
  }
  return x;
}

EvolutionarySystem hierarchy_flow(const VectorPotential& v, int p, int l) {
  std::vector<RatFunc> x = hierarchy_field(v, p, l + 1);
  std::vector<EpsSeries> currents;
  for (const auto& xi : x) currents.push_back(EpsSeries::constant(DiffPoly(v.layout(), xi), 0, 0));
  EvolutionarySystem sys = EvolutionarySystem::from_currents(
      v.name + " flow (" + std::to_string(p) + "," + std::to_string(l) + ")", v.names, std::move(currents));
  sys.fixed_params = v.fixed_params;
  return sys;
}

namespace {

struct CatalogEntry {
  std::vector<std::string> fields;
  std::vector<std::string> components;
};

CatalogEntry catalog_text(const std::string& group) {
  if (group == "B2")
    return {{"u", "v"},
            {"-2/3*(c+3/4)*u^3 + u*v",
             "-1/6*(c+1)*(2*c+1)*u^4 + 1/2*v^2"}};
  if (group == "B3")
    return {{"u1", "u2", "u3"},
            {"1/3*(c+4/3)*(c+5/4)*u1^4 - (c+5/4)*u2*u1^2 + u1*u3 + 3/8*u2^2",
             "4/45*(c+5/4)*(c+2)*(c+1)*u1^5 - 1/9*(c+1)*u2*u1^3 - 1/2*(c+1)*u2^2*u1 + u2*u3",
             "1/2*u3^2 - 1/135*(c+3/2)*(c+1)*(8*c^2+20*c+13)*u1^6 + 1/3*(c+5/4)*(c+1)*(c+3/2)*u2*u1^4"
             " - 1/2*(c+1)*(c+3/2)*u2^2*u1^2 + 1/8*(c+3/2)*u2^3"}};
  if (group == "B4")
    return {{"u1", "u2", "u3", "u4"},
            {"(-32/5*c^3 - 131/15*c^2 - 953/240*c - 77/128)*u1^5 + 8*(c+7/16)*(c+11/24)*u1^3*u2"
             " + (-8/3*c - 7/6)*u3*u1^2 + (-2*c - 7/8)*u2^2*u1 + u4*u1 + 2/3*u3*u2",
             "(-64/15*c^4 - 392/45*c^3 - 1163/180*c^2 - 499/240*c - 63/256)*u1^6 + 4/3*(c+7/16)*(c+3/8)*u2*u1^4"
             " + (-2/9*c - 1/12)*u3*u1^3 + 4*(c+3/8)^2*u1^2*u2^2 + (-8/3*c - 1)*u3*u2*u1 + u4*u2 + 4/9*u3^2"
             " + (-2/3*c - 1/4)*u2^3",
             "(64/7*c^5 + 440/21*c^4 + 229/12*c^3 + 1453/168*c^2 + 3499/1792*c + 45/256)*u1^7"
             " - 96/5*(c+5/8)*(c^2+41/48*c+47/256)*(c+3/8)*u2*u1^5 + 1/3*(c+3/8)*(c+7/16)*u3*u1^4"
             " + 12*(c+5/8)*(c+3/8)*(c+5/12)*u1^3*u2^2 + (-1/2*c - 3/16)*u3*u2*u1^2"
             " + (-2*c^2 - 2*c - 15/32)*u1*u2^3 + (-4/3*c - 1/2)*u3^2*u1 + 1/8*u3*u2^2 + u4*u3",
             "(-128/7*c^6 - 48*c^5 - 158/3*c^4 - 371/12*c^3 - 983/96*c^2 - 1393/768*c - 481/3584)*u1^8"
             " + 128/3*(c+1/2)*(c+3/8)*(c+7/16)*(c^2+41/48*c+73/384)*u1^6*u2"
             " - 256/15*(c+1/2)*(c+3/8)*(c+11/24)*(c+7/16)*u3*u1^5"
             " - 32*(c+1/2)*(c+3/8)*(c^2+5/6*c+17/96)*u1^4*u2^2"
             " + 64/3*(c+1/2)*(c+3/8)*(c+7/16)*u1^3*u2*u3 + 8*(c+1/2)*(c+3/8)^2*u1^2*u2^3"
             " - 32/9*(c+1/2)*(c+3/8)*u3^2*u1^2 + (-16/3*c^2 - 14/3*c - 1)*u3*u2^2*u1"
             " + (-1/3*c^2 - 1/4*c - 1/24)*u2^4 + (8/9*c + 4/9)*u3^2*u2 + 1/2*u4^2"}};
  if (group == "I2")
    return {{"u", "v"},
            {"u*v - 2*c/(q+1)*u^(q+1)",
             "1/2*v^2 + (-m/(4*m-4)*c^2 + m/(m-1))*u^m"}};
  throw UsageError("unknown group '" + group + "'");
}

}  // namespace

VectorPotential catalog_potential(const std::string& group, std::optional<Rational> c, int m, bool doubled_m) {
  CatalogEntry entry = catalog_text(group);
  VectorPotential v;
  v.names.fields = entry.fields;
  ParseContext ctx;
  if (c) {
    v.fixed_params.emplace_back("c", *c);
    ctx.fixed_params["c"] = *c;
  } else {
    v.names.params = {"c"};
  }
  v.name = group;
  if (group == "I2") {
    int mm = doubled_m ? 2 * m : m;
    if (mm < 2) throw UsageError("I2(m) requires m >= 2");
    if (mm % 2) throw UsageError("I2(m) with odd m has non-polynomial flat coordinates; use the numeric check");
    ctx.fixed_params["m"] = Rational(mm);
    ctx.fixed_params["q"] = Rational(mm / 2);
    v.fixed_params.emplace_back("m", Rational(mm));
    v.name = "I2(" + std::to_string(mm) + ")";
  }
  ctx.names = v.names;
  for (const auto& text : entry.components) v.components.push_back(parse_function(text, ctx));
  v.unity = v.dimension() - 1;
  return v;
}

CheckResult check_i2_odd_associativity(int m, const Rational& c, const std::vector<std::pair<double, double>>& points) {
  // A^1 = uv − a u^{m/2+1}, A^2 = v²/2 + b u^m with real exponents.
  double q = m / 2.0;
  double cd = c.get_d();
  double a = 2 * cd / (q + 1);
  double b = -m / (4.0 * m - 4) * cd * cd + m / (m - 1.0);
  CheckResult r;
  for (auto [u, v] : points) {
    (void)v;
    double c1[2][2] = {{-a * (q + 1) * q * std::pow(u, q - 1), 1.0}, {1.0, 0.0}};
    double c2[2][2] = {{b * m * (m - 1) * std::pow(u, m - 2), 0.0}, {0.0, 1.0}};
    const double (*cc[2])[2] = {c1, c2};
    double scale = 1.0;
    for (auto* t : cc)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) scale = std::max(scale, std::abs(t[j][k]));
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k)
          for (int mm = 0; mm < 2; ++mm) {
            double s = 0;
            for (int l = 0; l < 2; ++l) s += cc[i][j][l] * cc[l][k][mm] - cc[i][k][l] * cc[l][j][mm];
            double rel = std::abs(s) / (scale * scale);
            r.max_numeric_residual = std::max(r.max_numeric_residual, rel);
          }
  }
  r.ok = r.max_numeric_residual <= 1e-9;
  return r;
}

CheckResult tsarev_check(const DiagonalSystem& d) {
  CheckResult r;
  auto n = d.velocities.size();
  Layout L = d.names.layout();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (d.velocities[i] == d.velocities[j]) throw FormError("characteristic velocities coincide");
  if (n <= 2) return r;
  auto var = [&](std::size_t k) { return static_cast<std::size_t>(L.field_var(static_cast<int>(k))); };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k) {
        if (i == j || i == k) continue;
        const RatFunc& vi = d.velocities[i];
        RatFunc a = vi.derivative(var(j)) / (d.velocities[j] - vi);
        RatFunc b = vi.derivative(var(k)) / (d.velocities[k] - vi);
        record(r, "tsarev" + idx({int(i), int(j), int(k)}), a.derivative(var(k)) - b.derivative(var(j)));
      }
  return r;
}

RiemannCheckResult riemann_invariant_check(const EvolutionarySystem& sys, const std::vector<RatFunc>& coords) {
  auto n = static_cast<std::size_t>(sys.nfields());
  if (coords.size() != n) throw DimensionError("need one coordinate function per field");
  Layout L = sys.layout();
  RatMatrix a = quasilinear_part(sys)[0];
  RatMatrix jac(n, std::vector<RatFunc>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) jac[i][j] = coords[i].derivative(static_cast<std::size_t>(L.field_var(int(j))));
  // Inverse via adjugate-free Gauss–Jordan over rational functions.
  RatMatrix m = jac, inv(n, std::vector<RatFunc>(n));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = RatFunc(1);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && m[piv][col].is_zero()) ++piv;
    if (piv == n) throw FormError("Jacobian of the coordinate change is singular");
    std::swap(m[piv], m[col]);
    std::swap(inv[piv], inv[col]);
    RatFunc p = m[col][col].inverse();
    for (std::size_t j = 0; j < n; ++j) {
      m[col][j] *= p;
      inv[col][j] *= p;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || m[r][col].is_zero()) continue;
      RatFunc f = m[r][col];
      for (std::size_t j = 0; j < n; ++j) {
        m[r][j] -= f * m[col][j];
        inv[r][j] -= f * inv[col][j];
      }
    }
  }
  RiemannCheckResult res;
  res.transformed.assign(n, std::vector<RatFunc>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l)
          if (!jac[i][k].is_zero() && !a[k][l].is_zero() && !inv[l][j].is_zero())
            res.transformed[i][j] += jac[i][k] * a[k][l] * inv[l][j];
  res.diagonal = true;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && !res.transformed[i][j].is_zero()) res.diagonal = false;
  for (std::size_t i = 0; i < n; ++i) res.velocities.push_back(res.transformed[i][i]);
  return res;
}

}  // namespace miura
