#include "miura/diffpoly.hpp"

#include <algorithm>
#include <sstream>

#include "miura/errors.hpp"

namespace miura {

JetMonomial JetMonomial::single(int field, int order, int power) {
  JetMonomial m;
  if (power == 0) return m;
  m.factors_.push_back({static_cast<std::uint8_t>(field), static_cast<std::uint8_t>(order),
                        static_cast<std::uint8_t>(power)});
  m.degree_ = order * power;
  return m;
}

int JetMonomial::power_of(int field, int order) const {
  for (const auto& f : factors_)
    if (f.field == field && f.order == order) return f.power;
  return 0;
}

int JetMonomial::max_order() const {
  int m = 0;
  for (const auto& f : factors_) m = std::max<int>(m, f.order);
  return m;
}

namespace {

bool factor_before(const JetFactor& a, const JetFactor& b) {
  return a.field != b.field ? a.field < b.field : a.order < b.order;
}

}  // namespace

JetMonomial JetMonomial::operator*(const JetMonomial& o) const {
  if (o.is_one()) return *this;
  if (is_one()) return o;
  JetMonomial m;
  m.degree_ = degree_ + o.degree_;
  auto i = factors_.begin(), j = o.factors_.begin();
  while (i != factors_.end() || j != o.factors_.end()) {
    if (j == o.factors_.end() || (i != factors_.end() && factor_before(*i, *j))) {
      m.factors_.push_back(*i++);
    } else if (i == factors_.end() || factor_before(*j, *i)) {
      m.factors_.push_back(*j++);
    } else {
      JetFactor f = *i++;
      f.power = static_cast<std::uint8_t>(f.power + (j++)->power);
      m.factors_.push_back(f);
    }
  }
  return m;
}

JetMonomial JetMonomial::without(int field, int order) const {
  JetMonomial m = *this;
  for (auto it = m.factors_.begin(); it != m.factors_.end(); ++it) {
    if (it->field == field && it->order == order) {
      if (--it->power == 0) m.factors_.erase(it);
      m.degree_ -= order;
      return m;
    }
  }
  throw Error("jet factor not present");
}

bool operator<(const JetMonomial& a, const JetMonomial& b) {
  if (a.degree_ != b.degree_) return a.degree_ < b.degree_;
  const auto& fa = a.factors_;
  const auto& fb = b.factors_;
  for (std::size_t k = 0; k < std::min(fa.size(), fb.size()); ++k) {
    if (fa[k].field != fb[k].field) return fa[k].field > fb[k].field;
    if (fa[k].order != fb[k].order) return fa[k].order < fb[k].order;
    if (fa[k].power != fb[k].power) return fa[k].power > fb[k].power;
  }
  return fa.size() < fb.size();
}

DiffPoly::DiffPoly(Layout layout, const RatFunc& c) : layout_(layout) {
  if (!c.is_zero()) terms_.emplace(JetMonomial(), c);
}

DiffPoly DiffPoly::jet(Layout layout, int field, int order) {
  if (order == 0) return DiffPoly(layout, RatFunc::variable(static_cast<std::size_t>(layout.field_var(field))));
  return term(layout, JetMonomial::single(field, order), RatFunc(1));
}

DiffPoly DiffPoly::param(Layout layout, int index) {
  return DiffPoly(layout, RatFunc::variable(static_cast<std::size_t>(index)));
}

DiffPoly DiffPoly::term(Layout layout, const JetMonomial& m, const RatFunc& c) {
  DiffPoly p(layout);
  p.add_term(m, c);
  return p;
}

bool DiffPoly::is_jet_free() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_one());
}

RatFunc DiffPoly::jet_free_part() const { return coefficient(JetMonomial()); }

RatFunc DiffPoly::coefficient(const JetMonomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? RatFunc() : it->second;
}

int DiffPoly::max_degree() const { return terms_.empty() ? 0 : terms_.rbegin()->first.degree(); }

int DiffPoly::min_degree() const { return terms_.empty() ? 0 : terms_.begin()->first.degree(); }

bool DiffPoly::is_homogeneous(int d) const { return terms_.empty() || (min_degree() == d && max_degree() == d); }

int DiffPoly::max_order() const {
  int m = 0;
  for (const auto& [mono, c] : terms_) m = std::max(m, mono.max_order());
  return m;
}

void DiffPoly::add_term(const JetMonomial& m, const RatFunc& c) {
  if (c.is_zero()) return;
  auto [it, inserted] = terms_.emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

DiffPoly DiffPoly::operator-() const {
  DiffPoly r = *this;
  for (auto& [m, c] : r.terms_) c = -c;
  return r;
}

DiffPoly& DiffPoly::operator+=(const DiffPoly& o) {
  if (terms_.empty()) layout_ = o.layout_;
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

DiffPoly& DiffPoly::operator-=(const DiffPoly& o) {
  if (terms_.empty()) layout_ = o.layout_;
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

DiffPoly operator*(const DiffPoly& a, const DiffPoly& b) {
  DiffPoly out(a.terms_.empty() ? b.layout_ : a.layout_);
  for (const auto& [ma, ca] : a.terms_)
    for (const auto& [mb, cb] : b.terms_) out.add_term(ma * mb, ca * cb);
  return out;
}

DiffPoly operator*(const RatFunc& c, const DiffPoly& a) {
  DiffPoly out(a.layout_);
  if (c.is_zero()) return out;
  for (const auto& [m, x] : a.terms_) out.terms_.emplace_hint(out.terms_.end(), m, c * x);
  return out;
}

DiffPoly DiffPoly::pow(unsigned e) const {
  DiffPoly result(layout_, RatFunc(1)), base = *this;
  while (e) {
    if (e & 1u) result = result * base;
    e >>= 1u;
    if (e) base = base * base;
  }
  return result;
}

DiffPoly DiffPoly::homogeneous_part(int d) const {
  DiffPoly out(layout_);
  for (const auto& [m, c] : terms_)
    if (m.degree() == d) out.terms_.emplace_hint(out.terms_.end(), m, c);
  return out;
}

DiffPoly total_x_derivative(const DiffPoly& f) {
  const Layout& L = f.layout();
  DiffPoly out(L);
  for (const auto& [m, c] : f.terms()) {
    for (int i = 0; i < L.nfields; ++i) {
      RatFunc dc = c.derivative(static_cast<std::size_t>(L.field_var(i)));
      if (!dc.is_zero()) out.add_term(m.with(i, 1), dc);
    }
    for (const auto& fac : m.factors()) {
      JetMonomial next = m.without(fac.field, fac.order).with(fac.field, fac.order + 1);
      out.add_term(next, c.scaled(Rational(fac.power)));
    }
  }
  return out;
}

DiffPoly total_x_derivative(const DiffPoly& f, int times) {
  DiffPoly r = f;
  for (int k = 0; k < times; ++k) r = total_x_derivative(r);
  return r;
}

DiffPoly partial_jet_derivative(const DiffPoly& f, JetVar x) {
  const Layout& L = f.layout();
  DiffPoly out(L);
  if (x.order == 0) {
    auto var = static_cast<std::size_t>(L.field_var(x.field));
    for (const auto& [m, c] : f.terms()) out.add_term(m, c.derivative(var));
    return out;
  }
  for (const auto& [m, c] : f.terms()) {
    int p = m.power_of(x.field, x.order);
    if (p) out.add_term(m.without(x.field, x.order), c.scaled(Rational(p)));
  }
  return out;
}

std::vector<std::string> NameTable::coefficient_names() const {
  std::vector<std::string> names = params;
  names.insert(names.end(), fields.begin(), fields.end());
  return names;
}

namespace {

std::string jet_string(const JetMonomial& m, const NameTable& names) {
  std::string s;
  for (const auto& f : m.factors()) {
    if (!s.empty()) s += "*";
    s += "D(" + names.fields[f.field] + "," + std::to_string(f.order) + ")";
    if (f.power > 1) s += "^" + std::to_string(f.power);
  }
  return s;
}

}  // namespace

std::string to_string(const DiffPoly& f, const NameTable& names) {
  if (f.is_zero()) return "0";
  std::vector<std::string> cn = names.coefficient_names();
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : f.terms()) {
    std::string jets = jet_string(m, names);
    std::string coef;
    bool negative = false;
    if (c.is_polynomial() && c.num().is_monomial()) {
      const Term& t = c.num().leading();
      negative = sgn(t.coef) < 0;
      Poly a = c.num().scaled(negative ? Rational(-1) : Rational(1));
      if (!(a.is_one() && !jets.empty())) coef = to_string(a, cn);
    } else {
      coef = "(" + to_string(c, cn) + ")";
    }
    if (first) {
      if (negative) os << "-";
    } else {
      os << (negative ? " - " : " + ");
    }
    first = false;
    os << coef;
    if (!coef.empty() && !jets.empty()) os << "*";
    os << jets;
  }
  return os.str();
}

}  // namespace miura
