#include "miura/deform.hpp"

#include <algorithm>
#include <climits>
#include <fstream>
#include <functional>
#include <sstream>

#include "miura/errors.hpp"
#include "miura/linsolve.hpp"

namespace miura {

namespace {

constexpr std::size_t U = 0, V = 1;

std::string read_data(const std::string& name) {
  std::string path = std::string(MIURA_DATA_DIR) + "/deformations/" + name + ".txt";
  std::ifstream in(path);
  if (!in) throw Error("cannot open deformation table " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

RatFunc var(std::size_t i) { return RatFunc::variable(i); }

RatFunc monomial_in_fields(std::size_t offset, std::span<const int> e, const Rational& c) {
  Monomial num, den;
  for (std::size_t j = 0; j < e.size(); ++j) {
    if (e[j] > 0) num = num * Monomial::variable(offset + j, static_cast<unsigned>(e[j]));
    if (e[j] < 0) den = den * Monomial::variable(offset + j, static_cast<unsigned>(-e[j]));
  }
  return RatFunc(Poly::monomial(num, c), Poly::monomial(den, 1));
}

Poly lcm(const Poly& a, const Poly& b) {
  if (a.is_one()) return b;
  if (b.is_one()) return a;
  return *divide_exact(a * b, gcd(a, b));
}

const std::vector<EpsSeries>& currents_of(const EvolutionarySystem& s) {
  if (!s.currents) throw FormError("system '" + s.name + "' is not in conservation form");
  return *s.currents;
}

void require_fields_only(const EvolutionarySystem& s) {
  if (s.layout().nparams != 0) throw FormError("system '" + s.name + "' has symbolic parameters; fix them first");
}

Plugin zero_plugin(const std::string& name) {
  Plugin p;
  p.name = name;
  return p;
}

std::string pair_string(std::pair<int, int> f) {
  return "(" + std::to_string(f.first) + "," + std::to_string(f.second) + ")";
}

}  // namespace

VectorPotential DeformationCase::potential() const {
  if (group == "I2") return catalog_potential("I2", c, m, true);
  return catalog_potential(group, c);
}

std::vector<std::string> deformation_case_names() {
  return {"b2_frobenius", "b2_cm1", "b2_cmhalf", "b2_generic", "i2_frobenius", "i2_cpm2", "i2_generic"};
}

DeformationCase deformation_case(const std::string& name, std::optional<Rational> c, std::optional<int> m) {
  DeformationCase dc;
  dc.name = name;
  auto fixed_c = [&](const Rational& value) {
    if (c && *c != value) throw UsageError("case " + name + " requires c = " + to_string(value));
    dc.c = value;
  };
  if (name.starts_with("b2_") && m) throw UsageError("case " + name + " takes no m");
  if (name == "b2_frobenius") {
    dc.group = "B2";
    fixed_c(Rational(-3, 4));
    dc.plugins = {"F1", "F2"};
    dc.flow = {1, 0};
    dc.symmetry = {2, 1};
  } else if (name == "b2_cm1" || name == "b2_cmhalf") {
    dc.group = "B2";
    fixed_c(name == "b2_cm1" ? Rational(-1) : Rational(-1, 2));
    dc.plugins = {"F1", "F2", "F3"};
    dc.flow = {2, 1};
    dc.symmetry = {2, 2};
  } else if (name == "b2_generic") {
    dc.group = "B2";
    dc.c = c.value_or(Rational(1, 4));
    if (dc.c == Rational(-3, 4) || dc.c == -1 || dc.c == Rational(-1, 2))
      throw UsageError("c = " + to_string(dc.c) + " is a special value; use its own case");
    if (Rational(4 * dc.c).get_den() != 1) throw UsageError("b2_generic needs 4c integral (exponents of u are 4c+4 and -4c-2)");
    dc.plugins = {"F1", "F2"};
    dc.flow = {1, 0};
    dc.symmetry = {2, 1};
  } else if (name.starts_with("i2_")) {
    dc.group = "I2";
    dc.m = m.value_or(2);
    if (dc.m < 2) throw UsageError("I2 cases need m >= 2");
    if (name == "i2_frobenius") {
      fixed_c(Rational(0));
      dc.plugins = {"F1", "F2"};
      dc.flow = {1, 0};
      dc.symmetry = {2, 1};
    } else if (name == "i2_cpm2") {
      dc.c = c.value_or(Rational(2));
      if (dc.c != 2 && dc.c != -2) throw UsageError("i2_cpm2 needs c = 2 or c = -2");
      dc.sign = dc.c > 0 ? 1 : -1;
      dc.plugins = {"F1", "F2", "F3"};
      dc.flow = {2, 1};
      dc.symmetry = {2, 2};
    } else if (name == "i2_generic") {
      dc.c = c.value_or(Rational(4));
      if (dc.c == 0 || dc.c == 2 || dc.c == -2)
        throw UsageError("c = " + to_string(dc.c) + " is a special value; use its own case");
      if (Rational(dc.c * (dc.m - 1) / 2).get_den() != 1)
        throw UsageError("i2_generic needs c(m-1)/2 integral (exponents of u in a23)");
      dc.plugins = {"F1", "F2"};
      dc.flow = {1, 0};
      dc.symmetry = {2, 1};
    } else {
      throw UsageError("unknown deformation case '" + name + "'");
    }
  } else {
    throw UsageError("unknown deformation case '" + name + "'");
  }
  return dc;
}

namespace {

DocumentBindings bindings_for(const DeformationCase& dc, const PluginMap& plugins) {
  DocumentBindings b;
  for (const auto& [name, p] : plugins)
    if (std::find(dc.plugins.begin(), dc.plugins.end(), name) == dc.plugins.end())
      throw UsageError("case " + dc.name + " has no plugin " + name);
  for (const auto& name : dc.plugins) {
    auto it = plugins.find(name);
    Plugin p = it == plugins.end() ? zero_plugin(name) : it->second;
    p.name = name;
    b.funcs[name] = p;
  }
  if (dc.name == "b2_generic" || dc.name == "i2_generic") b.params["c"] = dc.c;
  if (dc.group == "I2") b.params["m"] = Rational(dc.m);
  if (dc.sign) b.params["s"] = Rational(*dc.sign);
  return b;
}

void check_limit(const DeformationCase& dc, const EvolutionarySystem& sys, std::pair<int, int> flow) {
  EvolutionarySystem ref = hierarchy_flow(dc.potential(), flow.first, flow.second);
  for (int i = 0; i < sys.nfields(); ++i) {
    RatFunc got = currents_of(sys)[static_cast<std::size_t>(i)][0].jet_free_part();
    RatFunc want = currents_of(ref)[static_cast<std::size_t>(i)][0].jet_free_part();
    if (got != want)
      throw FormError("table " + dc.name + ": dispersionless current " + sys.names.fields[static_cast<std::size_t>(i)] +
                      " differs from flow " + pair_string(flow));
  }
}

}  // namespace

EvolutionarySystem build_deformation(const DeformationCase& dc, const PluginMap& plugins) {
  DocumentBindings b = bindings_for(dc, plugins);
  std::string table = dc.name;
  Document doc = parse_document(read_data(table), b);
  if (dc.name == "i2_cpm2" && !b.funcs["F3"].is_zero()) {
    if (dc.m == 2) throw PoleError("i2_cpm2: the F3 coefficients have a pole at m = 2");
    Document extra = parse_document(read_data("i2_cpm2_f3"), b);
    for (std::size_t i = 0; i < doc.entries.size(); ++i) doc.entries[i] += extra.entries[i];
  }
  EvolutionarySystem sys = to_system(doc);
  sys.name = dc.name;
  check_limit(dc, sys, dc.flow);
  return sys;
}

RatFunc symmetry_equation_residual(const DeformationCase& dc, const SymmetryData& data) {
  if (dc.group != "B2") throw FormError("no symmetry family equation for case " + dc.name + "; use hierarchy flows");
  RatFunc u = var(U);
  if (dc.name == "b2_cm1" || dc.name == "b2_cmhalf") {
    if (!data.f || !data.g) throw UsageError("case " + dc.name + " needs symmetry data f and g");
    if (!data.g->derivative(U).is_zero()) throw FormError("g must depend on v only");
    const RatFunc& f = *data.f;
    RatFunc sign = dc.name == "b2_cmhalf" ? RatFunc(1) : RatFunc(-1);
    return f.derivative(U) + sign * u * f.derivative(V) - data.g->derivative(V);
  }
  if (!data.h) throw UsageError("case " + dc.name + " needs symmetry data h");
  const RatFunc& h = *data.h;
  const Rational& c = dc.c;
  RatFunc hu = h.derivative(U);
  return u * hu.derivative(U) + RatFunc(4 * c + 3) * u * u * hu.derivative(V) +
         RatFunc(2 * (c + 1) * (2 * c + 1)) * u.pow(3) * h.derivative(V).derivative(V) - RatFunc(2) * hu;
}

EvolutionarySystem build_symmetry(const DeformationCase& dc, const SymmetryData& data, const PluginMap& plugins) {
  RatFunc res = symmetry_equation_residual(dc, data);
  NameTable names;
  names.fields = {"u", "v"};
  if (!res.is_zero())
    throw FormError("symmetry data violates the defining equation; residual " + to_string(res, names.coefficient_names()));
  Layout L = names.layout();
  auto current = [&](const RatFunc& f) { return EpsSeries::constant(DiffPoly(L, f), 0, 0); };
  if (dc.name == "b2_frobenius") {
    DocumentBindings b = bindings_for(dc, plugins);
    b.lets["h"] = *data.h;
    EvolutionarySystem sys = to_system(parse_document(read_data("b2_frobenius_symmetry"), b));
    sys.fixed_params = {{"c", dc.c}};
    return sys;
  }
  EvolutionarySystem sys;
  if (dc.name == "b2_cm1" || dc.name == "b2_cmhalf") {
    sys = EvolutionarySystem::from_currents("symmetry", names, {current(*data.f), current(*data.g)});
  } else {
    const RatFunc& h = *data.h;
    RatFunc k = RatFunc(Rational(-1) / (2 * (dc.c + 1) * (2 * dc.c + 1)));
    sys = EvolutionarySystem::from_currents("symmetry", names,
                                            {current(k * h.derivative(U) / var(U).pow(2)), current(h.derivative(V))});
  }
  sys.fixed_params = {{"c", dc.c}};
  return sys;
}

namespace {

/// The extension problem is linear in the unknown corrections. Each family of
/// unknowns is φ·J placed in one component at one ε-order, with J a jet
/// monomial of matching differential degree and φ = Π (u^j)^{a_j}. The
/// bracket with α is computed once with symbolic exponents a_j (extra
/// coefficient variables) and divided by φ; each concrete exponent then
/// contributes a shifted, evaluated copy.
class SymmetryExtender {
 public:
  SymmetryExtender(const EvolutionarySystem& sys, const EvolutionarySystem& seed)
      : sys_(sys), seed_(seed), n_(sys.nfields()), N_(sys.order), LE_{n_, n_} {
    require_fields_only(sys);
    require_fields_only(seed);
    if (seed.nfields() != n_) throw DimensionError("seed and system differ in the number of fields");
    for (int j = 0; j < n_; ++j) images_.push_back(var(static_cast<std::size_t>(n_ + j)));
    for (const auto& c : currents_of(sys)) {
      std::vector<DiffPoly> coeffs;
      for (int k = 0; k <= N_; ++k) coeffs.push_back(lift(c[k]));
      alpha_.push_back(std::move(coeffs));
    }
    tau_ = DiffPoly(LE_);
    for (int j = 0; j < n_; ++j)
      tau_.add_term(JetMonomial::single(j, 1), var(static_cast<std::size_t>(j)) / field(j));
  }

  EvolutionarySystem run() {
    for (const auto& c : currents_of(seed_))
      if (!c[0].is_jet_free()) throw FormError("seed symmetry must be dispersionless");
    std::vector<EpsSeries> beta0;
    for (const auto& c : currents_of(seed_)) beta0.push_back(EpsSeries::constant(c[0], N_, 0));
    FormList r0 = bracket_flat(currents_of(sys_), beta0);
    if (all_zero(r0)) return EvolutionarySystem::from_currents(seed_.name, seed_.names, beta0);
    build_families();
    collect(r0);
    for (int margin = 0; margin <= 3; ++margin) {
      auto sol = solve(margin);
      if (!sol) continue;
      std::vector<EpsSeries> beta = assemble(beta0, *sol);
      if (!all_zero(bracket_flat(currents_of(sys_), beta)))
        throw Error("internal inconsistency: extended symmetry fails the bracket check");
      EvolutionarySystem out = EvolutionarySystem::from_currents(seed_.name, seed_.names, beta);
      out.fixed_params = seed_.fixed_params;
      return out;
    }
    throw FormError("no Laurent-polynomial extension of '" + seed_.name + "' found");
  }

 private:
  struct Family {
    int component;
    int eps;
    JetMonomial jet;
  };
  using Key = std::tuple<int, int, JetMonomial>;
  struct Group {
    std::vector<std::pair<std::size_t, RatFunc>> terms;  // (family, coefficient / φ)
    RatFunc r0;
  };
  /// Field exponents, symbolic-exponent powers and value of one numerator term.
  struct Piece {
    std::vector<int> fexp;
    std::vector<unsigned> aexp;
    Rational coef;
  };

  RatFunc field(int j) const { return var(static_cast<std::size_t>(n_ + j)); }
  RatFunc lift(const RatFunc& f) const { return compose(f, images_); }
  DiffPoly lift(const DiffPoly& p) const {
    DiffPoly out(LE_);
    for (const auto& [m, c] : p.terms()) out.add_term(m, lift(c));
    return out;
  }
  DiffPoly twisted(const DiffPoly& w) const { return total_x_derivative(w) + tau_ * w; }

  void enumerate_jets(int degree, int start, JetMonomial cur, std::vector<JetMonomial>& out) const {
    if (degree == 0) {
      out.push_back(cur);
      return;
    }
    for (int slot = start; slot < n_ * degree + n_; ++slot) {
      int f = slot % n_, ord = slot / n_ + 1;
      if (ord > degree) break;
      enumerate_jets(degree - ord, slot, cur.with(f, ord), out);
    }
  }

  void build_families() {
    for (int k0 = 1; k0 <= N_; ++k0) {
      std::vector<JetMonomial> jets;
      enumerate_jets(k0, 0, JetMonomial(), jets);
      for (int i0 = 0; i0 < n_; ++i0)
        for (const auto& J : jets) families_.push_back({i0, k0, J});
    }
  }

  /// {α, φ J e_{i0} ε^{k0}} / φ, indexed [ε-order][component].
  std::vector<std::vector<DiffPoly>> family_bracket(const Family& fam) const {
    std::vector<std::vector<DiffPoly>> res(static_cast<std::size_t>(N_ + 1), std::vector<DiffPoly>(static_cast<std::size_t>(n_), DiffPoly(LE_)));
    DiffPoly J = DiffPoly::term(LE_, fam.jet, 1);
    std::vector<DiffPoly> dphi{J};
    for (int e = 0; e + fam.eps <= N_; ++e) {
      auto& out = res[static_cast<std::size_t>(e + fam.eps)];
      for (int i = 0; i < n_; ++i) {
        const DiffPoly& a = alpha_[static_cast<std::size_t>(i)][static_cast<std::size_t>(e)];
        for (int s = 0; s <= a.max_order(); ++s) {
          DiffPoly d = partial_jet_derivative(a, {fam.component, s});
          if (d.is_zero()) continue;
          while (static_cast<int>(dphi.size()) <= s + 1) dphi.push_back(twisted(dphi.back()));
          out[static_cast<std::size_t>(i)] += dphi[static_cast<std::size_t>(s + 1)] * d;
        }
      }
      DiffPoly b(LE_);
      for (int k = 0; k < n_; ++k) {
        const DiffPoly& a = alpha_[static_cast<std::size_t>(k)][static_cast<std::size_t>(e)];
        if (a.is_zero()) continue;
        b += (var(static_cast<std::size_t>(k)) / field(k)) * (total_x_derivative(a) * J);
        for (int s = 1; s <= fam.jet.max_order(); ++s) {
          DiffPoly dj = partial_jet_derivative(J, {k, s});
          if (!dj.is_zero()) b += total_x_derivative(a, s + 1) * dj;
        }
      }
      out[static_cast<std::size_t>(fam.component)] -= b;
    }
    return res;
  }

  void collect(const FormList& r0) {
    for (std::size_t f = 0; f < families_.size(); ++f) {
      auto res = family_bracket(families_[f]);
      for (int e = 0; e <= N_; ++e)
        for (int i = 0; i < n_; ++i)
          for (const auto& [m, c] : res[static_cast<std::size_t>(e)][static_cast<std::size_t>(i)].terms())
            groups_[Key{e, i, m}].terms.emplace_back(f, c);
    }
    for (int i = 0; i < n_; ++i)
      for (int e = 0; e <= N_; ++e)
        for (const auto& [m, c] : r0[static_cast<std::size_t>(i)][e].terms()) groups_[Key{e, i, m}].r0 = lift(c);
    std::uint32_t amask = (1u << n_) - 1;
    for (auto& [key, g] : groups_) {
      Poly den = g.r0.den();
      for (const auto& [f, c] : g.terms) {
        if (c.den().support() & amask) throw Error("internal inconsistency: exponent variables in a denominator");
        den = lcm(den, c.den());
      }
      GroupPieces gp;
      for (const auto& [f, c] : g.terms) gp.terms.emplace_back(f, pieces(c, den));
      if (!g.r0.is_zero()) gp.r0 = pieces(g.r0, den);
      pieces_.push_back(std::move(gp));
    }
  }

  std::vector<Piece> pieces(const RatFunc& c, const Poly& den) const {
    Poly num = c.num() * *divide_exact(den, c.den());
    std::vector<Piece> out;
    for (const auto& t : num.terms()) {
      Piece p;
      for (int j = 0; j < n_; ++j) {
        p.aexp.push_back(t.mono.exp[static_cast<std::size_t>(j)]);
        p.fexp.push_back(t.mono.exp[static_cast<std::size_t>(n_ + j)]);
      }
      p.coef = t.coef;
      out.push_back(std::move(p));
    }
    return out;
  }

  std::optional<std::vector<Rational>> solve(int margin) {
    // Exponent box: every shift that moves a family term onto a term of the seed residual.
    std::vector<int> lo(static_cast<std::size_t>(n_), INT_MAX), hi(static_cast<std::size_t>(n_), INT_MIN);
    for (const auto& gp : pieces_)
      for (const auto& t0 : gp.r0)
        for (const auto& [f, ps] : gp.terms)
          for (const auto& p : ps)
            for (std::size_t j = 0; j < lo.size(); ++j) {
              int e = t0.fexp[j] - p.fexp[j];
              lo[j] = std::min(lo[j], e);
              hi[j] = std::max(hi[j], e);
            }
    bool any = lo[0] <= hi[0];
    if (!any) return std::nullopt;
    std::size_t box = 1;
    for (int j = 0; j < n_; ++j) {
      lo[static_cast<std::size_t>(j)] -= margin;
      hi[static_cast<std::size_t>(j)] += margin;
      box *= static_cast<std::size_t>(hi[static_cast<std::size_t>(j)] - lo[static_cast<std::size_t>(j)] + 1);
    }
    box_lo_ = lo;
    box_hi_ = hi;
    box_size_ = box;
    std::vector<std::vector<int>> exps;
    for (std::size_t idx = 0; idx < box; ++idx) exps.push_back(exponent_at(idx));

    std::map<std::pair<std::size_t, std::vector<int>>, std::pair<SparseRow, Rational>> eqs;
    for (std::size_t g = 0; g < pieces_.size(); ++g) {
      const auto& gp = pieces_[g];
      for (const auto& t0 : gp.r0) eqs[{g, t0.fexp}].second += t0.coef;
      for (const auto& [f, ps] : gp.terms)
        for (const auto& p : ps)
          for (std::size_t idx = 0; idx < box; ++idx) {
            const auto& E = exps[idx];
            Rational val = p.coef;
            for (int j = 0; j < n_ && sgn(val) != 0; ++j) {
              Rational pw = 1;
              for (unsigned r = 0; r < p.aexp[static_cast<std::size_t>(j)]; ++r) pw *= E[static_cast<std::size_t>(j)];
              val *= pw;
            }
            if (sgn(val) == 0) continue;
            std::vector<int> T(static_cast<std::size_t>(n_));
            for (int j = 0; j < n_; ++j) T[static_cast<std::size_t>(j)] = E[static_cast<std::size_t>(j)] + p.fexp[static_cast<std::size_t>(j)];
            eqs[{g, T}].first[f * box + idx] += val;
          }
    }
    SparseLinearSystem ls(families_.size() * box);
    for (auto& [k, eq] : eqs) {
      ls.add_equation(std::move(eq.first), eq.second);
      if (!ls.consistent()) return std::nullopt;
    }
    return ls.solve();
  }

  std::vector<int> exponent_at(std::size_t idx) const {
    std::vector<int> e(static_cast<std::size_t>(n_));
    for (int j = n_ - 1; j >= 0; --j) {
      std::size_t w = static_cast<std::size_t>(box_hi_[static_cast<std::size_t>(j)] - box_lo_[static_cast<std::size_t>(j)] + 1);
      e[static_cast<std::size_t>(j)] = box_lo_[static_cast<std::size_t>(j)] + static_cast<int>(idx % w);
      idx /= w;
    }
    return e;
  }

  std::vector<EpsSeries> assemble(const std::vector<EpsSeries>& beta0, const std::vector<Rational>& x) const {
    Layout L = sys_.layout();
    std::vector<std::vector<DiffPoly>> coeffs(static_cast<std::size_t>(n_), std::vector<DiffPoly>(static_cast<std::size_t>(N_ + 1), DiffPoly(L)));
    for (int i = 0; i < n_; ++i) coeffs[static_cast<std::size_t>(i)][0] = beta0[static_cast<std::size_t>(i)][0];
    for (std::size_t k = 0; k < x.size(); ++k) {
      if (sgn(x[k]) == 0) continue;
      const Family& fam = families_[k / box_size_];
      std::vector<int> e = exponent_at(k % box_size_);
      coeffs[static_cast<std::size_t>(fam.component)][static_cast<std::size_t>(fam.eps)].add_term(
          fam.jet, monomial_in_fields(0, e, x[k]));
    }
    std::vector<EpsSeries> out;
    for (auto& c : coeffs) out.emplace_back(std::move(c), N_, 0);
    return out;
  }

  struct GroupPieces {
    std::vector<std::pair<std::size_t, std::vector<Piece>>> terms;
    std::vector<Piece> r0;
  };

  const EvolutionarySystem& sys_;
  const EvolutionarySystem& seed_;
  int n_;
  int N_;
  Layout LE_;
  std::vector<RatFunc> images_;
  std::vector<std::vector<DiffPoly>> alpha_;
  DiffPoly tau_;
  std::vector<Family> families_;
  std::map<Key, Group> groups_;
  std::vector<GroupPieces> pieces_;
  std::vector<int> box_lo_, box_hi_;
  std::size_t box_size_ = 0;
};

}  // namespace

EvolutionarySystem extend_symmetry(const EvolutionarySystem& sys, const EvolutionarySystem& seed) {
  return SymmetryExtender(sys, seed).run();
}

namespace {

/// h with 4 h_u / u^2 and h_v the currents of a flow of the c = -3/4 hierarchy.
RatFunc frobenius_generator(const EvolutionarySystem& flow) {
  const auto& cur = currents_of(flow);
  RatFunc u = var(U);
  std::vector<RatFunc> w{u * u * cur[0][0].jet_free_part() / RatFunc(4), cur[1][0].jet_free_part()};
  return integrate_closed_form(w, flow.layout());
}

}  // namespace

std::vector<EvolutionarySystem> case_symmetries(const DeformationCase& dc, const PluginMap& plugins) {
  VectorPotential pot = dc.potential();
  if (dc.name == "b2_frobenius") {
    std::vector<EvolutionarySystem> out;
    for (auto [p, l] : {std::pair{2, 1}, std::pair{2, 2}}) {
      SymmetryData d;
      d.h = frobenius_generator(hierarchy_flow(pot, p, l));
      EvolutionarySystem s = build_symmetry(dc, d, plugins);
      s.name = "symmetry" + pair_string({p, l});
      out.push_back(std::move(s));
    }
    return out;
  }
  EvolutionarySystem sys = build_deformation(dc, plugins);
  EvolutionarySystem seed = hierarchy_flow(pot, dc.symmetry.first, dc.symmetry.second);
  seed.name = "symmetry" + pair_string(dc.symmetry);
  return {extend_symmetry(sys, seed)};
}

IntegrabilityReport verify_integrability(const EvolutionarySystem& sys, const std::vector<EvolutionarySystem>& symmetries) {
  IntegrabilityReport r;
  r.order = sys.order;
  for (const auto& s : symmetries) r.order = std::min(r.order, s.order);
  auto truncated = [&](const EvolutionarySystem& s) {
    FormList out;
    for (const auto& c : currents_of(s)) out.push_back(series_truncate(c, r.order));
    return out;
  };
  std::vector<std::pair<std::string, FormList>> all{{sys.name, truncated(sys)}};
  for (std::size_t i = 0; i < symmetries.size(); ++i) {
    std::string name = symmetries[i].name.empty() ? "symmetry " + std::to_string(i + 1) : symmetries[i].name;
    all.emplace_back(name, truncated(symmetries[i]));
  }
  for (std::size_t a = 0; a < all.size(); ++a)
    for (std::size_t b = a + 1; b < all.size(); ++b) {
      FormList br = bracket_flat(all[a].second, all[b].second);
      BracketCheck c;
      c.label = "{" + all[a].first + ", " + all[b].first + "}";
      c.ok = all_zero(br);
      if (!c.ok) {
        std::string s;
        for (std::size_t i = 0; i < br.size(); ++i) {
          if (!s.empty()) s += "; ";
          s += sys.names.fields[i] + ": " + to_string(br[i], sys.names);
        }
        c.residual = s;
        r.ok = false;
      }
      r.checks.push_back(std::move(c));
    }
  return r;
}

TrivialitySystem triviality_system(const EvolutionarySystem& sys) {
  require_fields_only(sys);
  const auto& cur = currents_of(sys);
  TrivialitySystem t;
  t.names = sys.names;
  int n = sys.nfields();
  if (sys.order < 1) return t;
  bool any = false;
  for (const auto& c : cur) any = any || !c[1].is_zero();
  if (!any) return t;
  Layout L = sys.layout();
  auto fv = [&](int j) { return static_cast<std::size_t>(L.field_var(j)); };
  std::vector<std::vector<RatFunc>> A(static_cast<std::size_t>(n), std::vector<RatFunc>(static_cast<std::size_t>(n)));
  for (int i = 0; i < n; ++i) {
    if (!cur[static_cast<std::size_t>(i)][0].is_jet_free()) throw FormError("eps^0 currents must be jet-free");
    RatFunc w = cur[static_cast<std::size_t>(i)][0].jet_free_part();
    for (int j = 0; j < n; ++j) A[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = w.derivative(fv(j));
  }
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      TrivialityConstraint c;
      c.component = i;
      c.field = k;
      c.label = sys.names.fields[static_cast<std::size_t>(i)] + ":" + sys.names.fields[static_cast<std::size_t>(k)] + "_x";
      c.inhomogeneous = cur[static_cast<std::size_t>(i)][1].coefficient(JetMonomial::single(k, 1));
      c.dM.assign(static_cast<std::size_t>(n), std::vector<RatFunc>(static_cast<std::size_t>(n)));
      for (int j = 0; j < n; ++j) {
        c.dM[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] += A[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
        c.dM[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] -= A[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      }
      t.constraints.push_back(std::move(c));
    }
  return t;
}

std::vector<RatFunc> triviality_residuals(const TrivialitySystem& tps, const std::vector<RatFunc>& M) {
  Layout L = tps.names.layout();
  std::vector<RatFunc> out;
  for (const auto& c : tps.constraints) {
    RatFunc r = c.inhomogeneous;
    for (std::size_t j = 0; j < c.dM.size(); ++j)
      for (std::size_t l = 0; l < c.dM[j].size(); ++l)
        if (!c.dM[j][l].is_zero()) r += c.dM[j][l] * M[j].derivative(static_cast<std::size_t>(L.field_var(static_cast<int>(l))));
    out.push_back(r);
  }
  return out;
}

namespace {

/// Basis of {λ : Σ_c λ_c row_c = 0} over the field of rational functions.
std::vector<std::vector<RatFunc>> left_nullspace(const std::vector<std::vector<RatFunc>>& rows) {
  std::size_t nr = rows.size(), nc = rows.empty() ? 0 : rows[0].size();
  // Reduce the transpose: columns are the multipliers.
  std::vector<std::vector<RatFunc>> m(nc, std::vector<RatFunc>(nr));
  for (std::size_t r = 0; r < nr; ++r)
    for (std::size_t c = 0; c < nc; ++c) m[c][r] = rows[r][c];
  std::vector<std::size_t> pivcol;
  std::size_t row = 0;
  for (std::size_t col = 0; col < nr && row < nc; ++col) {
    std::size_t p = row;
    while (p < nc && m[p][col].is_zero()) ++p;
    if (p == nc) continue;
    std::swap(m[p], m[row]);
    RatFunc inv = m[row][col].inverse();
    for (auto& x : m[row]) x *= inv;
    for (std::size_t r = 0; r < nc; ++r) {
      if (r == row || m[r][col].is_zero()) continue;
      RatFunc f = m[r][col];
      for (std::size_t c = 0; c < nr; ++c) m[r][c] -= f * m[row][c];
    }
    pivcol.push_back(col);
    ++row;
  }
  std::vector<std::vector<RatFunc>> basis;
  for (std::size_t free = 0; free < nr; ++free) {
    if (std::find(pivcol.begin(), pivcol.end(), free) != pivcol.end()) continue;
    std::vector<RatFunc> x(nr);
    x[free] = 1;
    for (std::size_t k = 0; k < pivcol.size(); ++k) x[pivcol[k]] = -m[k][free];
    basis.push_back(std::move(x));
  }
  return basis;
}

/// Scales to polynomial entries without common factor.
std::vector<RatFunc> primitive(std::vector<RatFunc> v) {
  Poly den = 1;
  for (const auto& x : v) den = lcm(den, x.den());
  Poly g;
  for (auto& x : v) {
    x *= RatFunc(den);
    g = gcd(g, x.num());
  }
  if (!g.is_zero())
    for (auto& x : v) x /= RatFunc(g);
  return v;
}

}  // namespace

TrivialityResult solve_triviality(const TrivialitySystem& tps, int max_degree) {
  if (max_degree < 0) throw UsageError("max_degree must be non-negative");
  TrivialityResult res;
  Layout L = tps.names.layout();
  int n = L.nfields;
  if (tps.constraints.empty()) {
    res.status = TrivialityResult::Status::Trivialized;
    res.M.assign(static_cast<std::size_t>(n), RatFunc());
    return res;
  }
  // Algebraic obstruction: a combination of the constraints without derivative terms.
  std::vector<std::vector<RatFunc>> rows;
  for (const auto& c : tps.constraints) {
    std::vector<RatFunc> r;
    for (const auto& dj : c.dM) r.insert(r.end(), dj.begin(), dj.end());
    rows.push_back(std::move(r));
  }
  std::optional<TrivialityResult> best;
  for (auto lambda : left_nullspace(rows)) {
    lambda = primitive(std::move(lambda));
    RatFunc obs;
    for (std::size_t c = 0; c < lambda.size(); ++c) obs += lambda[c] * tps.constraints[c].inhomogeneous;
    if (obs.is_zero()) continue;
    TrivialityResult r;
    r.status = TrivialityResult::Status::Obstructed;
    r.multipliers = lambda;
    r.obstruction = obs;
    std::size_t size = 0;
    for (const auto& l : lambda) size += l.num().size();
    std::size_t best_size = 0;
    if (best)
      for (const auto& l : best->multipliers) best_size += l.num().size();
    if (!best || size < best_size) best = r;
  }
  if (best) return *best;

  // Polynomial ansatz M_j = Σ x_{j,e} u^e with 0 < |e| <= max_degree.
  std::vector<std::vector<int>> exps;
  std::function<void(int, int, std::vector<int>&)> gen = [&](int j, int left, std::vector<int>& e) {
    if (j == n) {
      int d = 0;
      for (int x : e) d += x;
      if (d > 0) exps.push_back(e);
      return;
    }
    for (int p = 0; p <= left; ++p) {
      e[static_cast<std::size_t>(j)] = p;
      gen(j + 1, left - p, e);
    }
  };
  std::vector<int> scratch(static_cast<std::size_t>(n));
  gen(0, max_degree, scratch);
  std::size_t ne = exps.size();
  std::size_t off = static_cast<std::size_t>(L.nparams);
  SparseLinearSystem ls(static_cast<std::size_t>(n) * ne);
  for (const auto& c : tps.constraints) {
    Poly den = c.inhomogeneous.den();
    for (const auto& dj : c.dM)
      for (const auto& x : dj) den = lcm(den, x.den());
    std::map<std::vector<int>, std::pair<SparseRow, Rational>> eqs;
    auto add = [&](const Poly& p, std::optional<std::size_t> unknown) {
      for (const auto& t : p.terms()) {
        std::vector<int> key;
        for (int j = 0; j < L.nvars(); ++j) key.push_back(t.mono.exp[static_cast<std::size_t>(j)]);
        auto& eq = eqs[key];
        if (unknown) eq.first[*unknown] += t.coef;
        else eq.second += t.coef;
      }
    };
    add(c.inhomogeneous.num() * *divide_exact(den, c.inhomogeneous.den()), std::nullopt);
    for (std::size_t j = 0; j < c.dM.size(); ++j)
      for (std::size_t l = 0; l < c.dM[j].size(); ++l) {
        const RatFunc& a = c.dM[j][l];
        if (a.is_zero()) continue;
        Poly scaled = a.num() * *divide_exact(den, a.den());
        for (std::size_t e = 0; e < ne; ++e) {
          RatFunc mono = monomial_in_fields(off, exps[e], 1);
          Poly d = mono.derivative(off + l).num();
          if (!d.is_zero()) add(scaled * d, j * ne + e);
        }
      }
    for (auto& [k, eq] : eqs) ls.add_equation(std::move(eq.first), eq.second);
  }
  if (auto x = ls.solve()) {
    res.M.assign(static_cast<std::size_t>(n), RatFunc());
    for (std::size_t j = 0; j < static_cast<std::size_t>(n); ++j)
      for (std::size_t e = 0; e < ne; ++e)
        if (sgn((*x)[j * ne + e]) != 0) res.M[j] += monomial_in_fields(off, exps[e], (*x)[j * ne + e]);
    for (const auto& r : triviality_residuals(tps, res.M))
      if (!r.is_zero()) throw Error("internal inconsistency: triviality solution fails resubstitution");
    res.status = TrivialityResult::Status::Trivialized;
    return res;
  }
  res.status = TrivialityResult::Status::Inconclusive;
  return res;
}

std::string to_string(TrivialityResult::Status s) {
  switch (s) {
    case TrivialityResult::Status::Trivialized: return "trivialized";
    case TrivialityResult::Status::Obstructed: return "obstructed";
    case TrivialityResult::Status::Inconclusive: return "inconclusive";
  }
  return "";
}

}  // namespace miura
