#include "miura/poly.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace miura {

Monomial Monomial::variable(std::size_t var, unsigned power) {
  Monomial m;
  m.exp[var] = static_cast<std::uint16_t>(power);
  m.deg = static_cast<std::uint16_t>(power);
  return m;
}

bool Monomial::divides(const Monomial& other) const {
  if (deg > other.deg) return false;
  for (std::size_t i = 0; i < kMaxVars; ++i)
    if (exp[i] > other.exp[i]) return false;
  return true;
}

std::uint32_t Monomial::support() const {
  std::uint32_t mask = 0;
  for (std::size_t i = 0; i < kMaxVars; ++i)
    if (exp[i]) mask |= 1u << i;
  return mask;
}

Monomial operator*(const Monomial& a, const Monomial& b) {
  Monomial m;
  for (std::size_t i = 0; i < kMaxVars; ++i) m.exp[i] = static_cast<std::uint16_t>(a.exp[i] + b.exp[i]);
  m.deg = static_cast<std::uint16_t>(a.deg + b.deg);
  return m;
}

int compare(const Monomial& a, const Monomial& b) {
  if (a.deg != b.deg) return a.deg < b.deg ? -1 : 1;
  for (std::size_t i = 0; i < kMaxVars; ++i)
    if (a.exp[i] != b.exp[i]) return a.exp[i] < b.exp[i] ? -1 : 1;
  return 0;
}

Monomial quotient(const Monomial& a, const Monomial& b) {
  Monomial m;
  for (std::size_t i = 0; i < kMaxVars; ++i) m.exp[i] = static_cast<std::uint16_t>(a.exp[i] - b.exp[i]);
  m.deg = static_cast<std::uint16_t>(a.deg - b.deg);
  return m;
}

Monomial min_exponents(const Monomial& a, const Monomial& b) {
  Monomial m;
  unsigned d = 0;
  for (std::size_t i = 0; i < kMaxVars; ++i) {
    m.exp[i] = std::min(a.exp[i], b.exp[i]);
    d += m.exp[i];
  }
  m.deg = static_cast<std::uint16_t>(d);
  return m;
}

namespace {

bool term_greater(const Term& a, const Term& b) { return compare(a.mono, b.mono) > 0; }

template <typename Op>
std::vector<Term> merge(const std::vector<Term>& a, const std::vector<Term>& b, Op op) {
  std::vector<Term> out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    int c = i == a.size() ? -1 : j == b.size() ? 1 : compare(a[i].mono, b[j].mono);
    if (c > 0) {
      out.push_back(a[i++]);
    } else if (c < 0) {
      out.push_back({b[j].mono, op(Rational(0), b[j].coef)});
      ++j;
    } else {
      Rational s = op(a[i].coef, b[j].coef);
      if (sgn(s) != 0) out.push_back({a[i].mono, std::move(s)});
      ++i;
      ++j;
    }
  }
  return out;
}

}  // namespace

Poly::Poly(const Rational& c) {
  if (sgn(c) != 0) terms_.push_back({Monomial{}, c});
}

Poly Poly::variable(std::size_t var) { return monomial(Monomial::variable(var), Rational(1)); }

Poly Poly::monomial(const Monomial& m, const Rational& c) {
  Poly p;
  if (sgn(c) != 0) p.terms_.push_back({m, c});
  return p;
}

Poly Poly::from_terms(std::vector<Term> terms) {
  std::sort(terms.begin(), terms.end(), term_greater);
  Poly p;
  for (auto& t : terms) {
    if (!p.terms_.empty() && p.terms_.back().mono == t.mono) {
      p.terms_.back().coef += t.coef;
    } else {
      if (!p.terms_.empty() && sgn(p.terms_.back().coef) == 0) p.terms_.pop_back();
      p.terms_.push_back(std::move(t));
    }
  }
  if (!p.terms_.empty() && sgn(p.terms_.back().coef) == 0) p.terms_.pop_back();
  return p;
}

bool Poly::is_one() const { return terms_.size() == 1 && terms_[0].mono.is_one() && terms_[0].coef == 1; }

Rational Poly::constant_value() const {
  if (terms_.empty()) return Rational(0);
  const Term& last = terms_.back();
  return last.mono.is_one() ? last.coef : Rational(0);
}

Poly Poly::operator-() const {
  Poly p = *this;
  for (auto& t : p.terms_) t.coef = -t.coef;
  return p;
}

Poly& Poly::operator+=(const Poly& o) {
  if (o.terms_.empty()) return *this;
  if (terms_.empty()) return *this = o;
  terms_ = merge(terms_, o.terms_, [](const Rational& x, const Rational& y) { return Rational(x + y); });
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  if (o.terms_.empty()) return *this;
  terms_ = merge(terms_, o.terms_, [](const Rational& x, const Rational& y) { return Rational(x - y); });
  return *this;
}

Poly& Poly::operator*=(const Poly& o) { return *this = *this * o; }

Poly operator*(const Poly& a, const Poly& b) {
  if (a.terms_.empty() || b.terms_.empty()) return Poly();
  if (b.terms_.size() == 1) return a.mul_monomial(b.terms_[0].mono).scaled(b.terms_[0].coef);
  if (a.terms_.size() == 1) return b.mul_monomial(a.terms_[0].mono).scaled(a.terms_[0].coef);
  std::vector<Term> prod;
  prod.reserve(a.terms_.size() * b.terms_.size());
  for (const auto& x : a.terms_)
    for (const auto& y : b.terms_) prod.push_back({x.mono * y.mono, x.coef * y.coef});
  return Poly::from_terms(std::move(prod));
}

bool operator==(const Poly& a, const Poly& b) {
  if (a.terms_.size() != b.terms_.size()) return false;
  for (std::size_t i = 0; i < a.terms_.size(); ++i)
    if (!(a.terms_[i].mono == b.terms_[i].mono) || a.terms_[i].coef != b.terms_[i].coef) return false;
  return true;
}

Poly Poly::scaled(const Rational& c) const {
  if (sgn(c) == 0) return Poly();
  Poly p = *this;
  if (c != 1)
    for (auto& t : p.terms_) t.coef *= c;
  return p;
}

Poly Poly::mul_monomial(const Monomial& m) const {
  Poly p = *this;
  if (!m.is_one())
    for (auto& t : p.terms_) t.mono = t.mono * m;
  return p;
}

Poly Poly::div_monomial(const Monomial& m) const {
  Poly p = *this;
  if (!m.is_one())
    for (auto& t : p.terms_) t.mono = quotient(t.mono, m);
  return p;
}

Poly Poly::pow(unsigned e) const {
  Poly result(1), base = *this;
  while (e) {
    if (e & 1u) result *= base;
    e >>= 1u;
    if (e) base = base * base;
  }
  return result;
}

Poly Poly::derivative(std::size_t var) const {
  std::vector<Term> out;
  for (const auto& t : terms_) {
    if (t.mono.exp[var] == 0) continue;
    Term d{t.mono, t.coef * t.mono.exp[var]};
    d.mono.exp[var]--;
    d.mono.deg--;
    out.push_back(std::move(d));
  }
  return from_terms(std::move(out));
}

unsigned Poly::degree(std::size_t var) const {
  unsigned d = 0;
  for (const auto& t : terms_) d = std::max<unsigned>(d, t.mono.exp[var]);
  return d;
}

unsigned Poly::total_degree() const { return terms_.empty() ? 0 : terms_.front().mono.deg; }

std::uint32_t Poly::support() const {
  std::uint32_t mask = 0;
  for (const auto& t : terms_) mask |= t.mono.support();
  return mask;
}

Monomial Poly::monomial_content() const {
  if (terms_.empty()) return Monomial{};
  Monomial m = terms_.front().mono;
  for (const auto& t : terms_) m = min_exponents(m, t.mono);
  return m;
}

std::vector<Poly> Poly::coefficients_in(std::size_t var) const {
  std::vector<std::vector<Term>> buckets(degree(var) + 1);
  for (const auto& t : terms_) {
    Term r = t;
    unsigned e = r.mono.exp[var];
    r.mono.exp[var] = 0;
    r.mono.deg = static_cast<std::uint16_t>(r.mono.deg - e);
    buckets[e].push_back(std::move(r));
  }
  std::vector<Poly> out;
  out.reserve(buckets.size());
  for (auto& b : buckets) out.push_back(from_terms(std::move(b)));
  return out;
}

Poly Poly::from_coefficients(const std::vector<Poly>& coeffs, std::size_t var) {
  std::vector<Term> all;
  for (std::size_t e = 0; e < coeffs.size(); ++e) {
    Monomial m = Monomial::variable(var, static_cast<unsigned>(e));
    for (const auto& t : coeffs[e].terms()) all.push_back({t.mono * m, t.coef});
  }
  return from_terms(std::move(all));
}

Poly Poly::evaluate(std::size_t var, const Rational& value) const {
  std::vector<Rational> powers{Rational(1)};
  std::vector<Term> out;
  out.reserve(terms_.size());
  for (const auto& t : terms_) {
    unsigned e = t.mono.exp[var];
    while (powers.size() <= e) powers.push_back(powers.back() * value);
    Term r{t.mono, t.coef * powers[e]};
    if (sgn(r.coef) == 0) continue;
    r.mono.exp[var] = 0;
    r.mono.deg = static_cast<std::uint16_t>(r.mono.deg - e);
    out.push_back(std::move(r));
  }
  return from_terms(std::move(out));
}

Rational Poly::evaluate(std::span<const Rational> point) const {
  Rational sum = 0;
  for (const auto& t : terms_) {
    Rational v = t.coef;
    for (std::size_t i = 0; i < kMaxVars; ++i) {
      for (unsigned k = 0; k < t.mono.exp[i]; ++k) v *= point[i];
    }
    sum += v;
  }
  return sum;
}

double Poly::evaluate_double(std::span<const double> point) const {
  double sum = 0;
  for (const auto& t : terms_) {
    double v = t.coef.get_d();
    for (std::size_t i = 0; i < kMaxVars; ++i)
      if (t.mono.exp[i]) v *= std::pow(point[i], static_cast<int>(t.mono.exp[i]));
    sum += v;
  }
  return sum;
}

Poly Poly::monic() const {
  if (terms_.empty() || terms_.front().coef == 1) return *this;
  return scaled(Rational(1) / terms_.front().coef);
}

std::size_t Poly::hash() const {
  std::size_t h = terms_.size();
  for (const auto& t : terms_) {
    for (auto e : t.mono.exp) h = h * 31 + e;
    h = h * 1000003u ^ std::hash<std::string>{}(t.coef.get_str());
  }
  return h;
}

std::optional<Poly> divide_exact(const Poly& a, const Poly& b) {
  if (b.is_zero()) throw std::domain_error("division by zero polynomial");
  if (a.is_zero()) return Poly();
  if (b.is_constant()) return a.scaled(Rational(1) / b.leading().coef);
  if (b.is_monomial()) {
    const Term& lt = b.leading();
    for (const auto& t : a.terms())
      if (!lt.mono.divides(t.mono)) return std::nullopt;
    return a.div_monomial(lt.mono).scaled(Rational(1) / lt.coef);
  }
  if (a.total_degree() < b.total_degree()) return std::nullopt;
  for (std::size_t v = 0; v < kMaxVars; ++v)
    if (b.degree(v) > a.degree(v)) return std::nullopt;
  const Term& lt = b.leading();
  Rational inv = Rational(1) / lt.coef;
  std::vector<Term> q;
  Poly r = a;
  while (!r.is_zero()) {
    const Term& rt = r.leading();
    if (!lt.mono.divides(rt.mono)) return std::nullopt;
    Term t{quotient(rt.mono, lt.mono), rt.coef * inv};
    r -= b.mul_monomial(t.mono).scaled(t.coef);
    q.push_back(std::move(t));
  }
  return Poly::from_terms(std::move(q));
}

namespace {

Integer lcm_of_denominators(const Poly& p) {
  Integer l = 1;
  for (const auto& t : p.terms()) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), t.coef.get_den_mpz_t());
  return l;
}

Integer integer_content(const Poly& p) {
  Integer g = 0;
  for (const auto& t : p.terms()) {
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), t.coef.get_num_mpz_t());
    if (g == 1) break;
  }
  return g;
}

/// Scales to an integer polynomial with unit content and positive leading coefficient.
Poly primitive_integer(const Poly& p) {
  if (p.is_zero()) return p;
  Poly q = p.scaled(Rational(lcm_of_denominators(p)));
  Integer c = integer_content(q);
  if (sgn(q.leading().coef) < 0) c = -c;
  return q.scaled(Rational(1) / Rational(c));
}

Integer max_norm(const Poly& p) {
  Integer m = 0;
  for (const auto& t : p.terms()) {
    Integer a = abs(t.coef.get_num());
    if (a > m) m = a;
  }
  return m;
}

int top_variable(std::uint32_t mask) { return 31 - std::countl_zero(mask); }

Poly evaluate_integer(const Poly& p, std::size_t var, const Integer& xi) {
  return p.evaluate(var, Rational(xi));
}

/// Symmetric-remainder xi-adic reconstruction of a polynomial in `var`.
Poly interpolate(Poly gamma, const Integer& xi, std::size_t var) {
  std::vector<Term> out;
  Integer half = xi / 2;
  unsigned power = 0;
  while (!gamma.is_zero()) {
    std::vector<Term> rest;
    for (const auto& t : gamma.terms()) {
      Integer c = t.coef.get_num();
      Integer r = c % xi;
      if (r > half) r -= xi;
      if (r < -half) r += xi;
      if (r != 0) out.push_back({t.mono * Monomial::variable(var, power), Rational(r)});
      Integer next = (c - r) / xi;
      if (next != 0) rest.push_back({t.mono, Rational(next)});
    }
    gamma = Poly::from_terms(std::move(rest));
    if (++power > 4000) break;
  }
  return Poly::from_terms(std::move(out));
}

std::optional<Poly> heuristic_gcd(const Poly& a_in, const Poly& b_in) {
  Integer ca = integer_content(a_in), cb = integer_content(b_in);
  Integer c;
  mpz_gcd(c.get_mpz_t(), ca.get_mpz_t(), cb.get_mpz_t());
  Poly a = a_in.scaled(Rational(1) / Rational(ca));
  Poly b = b_in.scaled(Rational(1) / Rational(cb));
  std::uint32_t mask = a.support() | b.support();
  if (mask == 0) return Poly(Rational(c));
  if (a.is_constant() || b.is_constant()) return Poly(Rational(c));
  std::size_t var = static_cast<std::size_t>(top_variable(mask));
  Integer na = max_norm(a), nb = max_norm(b);
  Integer xi = 2 * std::min(na, nb) + 29;
  for (int attempt = 0; attempt < 6; ++attempt) {
    Poly ea = evaluate_integer(a, var, xi), eb = evaluate_integer(b, var, xi);
    if (!ea.is_zero() && !eb.is_zero()) {
      if (auto gamma = heuristic_gcd(ea, eb)) {
        Poly g = primitive_integer(interpolate(*gamma, xi, var));
        if (!g.is_zero() && divide_exact(a, g) && divide_exact(b, g)) return g.scaled(Rational(c));
      }
    }
    xi = xi * 73794 / 27011;
  }
  return std::nullopt;
}

Poly gcd_reduced(const Poly& a, const Poly& b);

/// Content with respect to the variables in `mask`, i.e. the gcd of the
/// coefficient polynomials when `p` is viewed as a polynomial in those variables.
Poly content_over(const Poly& p, std::uint32_t mask) {
  std::vector<std::pair<Monomial, std::vector<Term>>> groups;
  for (const auto& t : p.terms()) {
    Monomial key;
    Monomial rest = t.mono;
    unsigned d = 0;
    for (std::size_t i = 0; i < kMaxVars; ++i) {
      if (mask & (1u << i)) {
        key.exp[i] = t.mono.exp[i];
        d += key.exp[i];
        rest.exp[i] = 0;
      }
    }
    key.deg = static_cast<std::uint16_t>(d);
    rest.deg = static_cast<std::uint16_t>(rest.deg - d);
    auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& g) { return g.first == key; });
    if (it == groups.end()) {
      groups.push_back({key, {}});
      it = groups.end() - 1;
    }
    it->second.push_back({rest, t.coef});
  }
  Poly g;
  for (auto& [key, terms] : groups) {
    g = g.is_zero() ? Poly::from_terms(std::move(terms)).monic() : gcd_reduced(g, Poly::from_terms(std::move(terms)));
    if (g.is_constant()) return Poly(1);
  }
  return g;
}

/// Pseudo-remainder of a by b as polynomials in `var`.
Poly pseudo_remainder(const Poly& a, const Poly& b, std::size_t var) {
  std::vector<Poly> r = a.coefficients_in(var);
  std::vector<Poly> d = b.coefficients_in(var);
  std::size_t db = d.size() - 1;
  const Poly& lc = d.back();
  while (r.size() >= d.size()) {
    Poly lr = r.back();
    std::size_t shift = r.size() - d.size();
    for (auto& c : r) c *= lc;
    for (std::size_t i = 0; i <= db; ++i) r[i + shift] -= lr * d[i];
    while (!r.empty() && r.back().is_zero()) r.pop_back();
    if (r.empty()) break;
  }
  return Poly::from_coefficients(r, var);
}

Poly prs_gcd(const Poly& a, const Poly& b, std::size_t var) {
  auto cont = [&](const Poly& p) {
    Poly g;
    for (const auto& k : p.coefficients_in(var)) {
      if (k.is_zero()) continue;
      g = g.is_zero() ? k.monic() : gcd_reduced(g, k);
      if (g.is_constant()) return Poly(1);
    }
    return g;
  };
  Poly ca = cont(a), cb = cont(b);
  Poly c = gcd_reduced(ca, cb);
  Poly pa = divide_exact(a, ca).value(), pb = divide_exact(b, cb).value();
  if (pa.degree(var) < pb.degree(var)) std::swap(pa, pb);
  while (true) {
    Poly r = pseudo_remainder(pa, pb, var);
    if (r.is_zero()) break;
    if (r.degree(var) == 0) return c.monic();
    pa = pb;
    Poly cr = cont(r);
    pb = divide_exact(r, cr).value();
  }
  Poly cp = cont(pb);
  return (c * divide_exact(pb, cp).value()).monic();
}

/// gcd for polynomials without monomial content.
Poly gcd_reduced(const Poly& a, const Poly& b) {
  if (a.is_zero()) return b.monic();
  if (b.is_zero()) return a.monic();
  if (a.is_constant() || b.is_constant()) return Poly(1);
  Monomial ma = a.monomial_content(), mb = b.monomial_content();
  Monomial mg = min_exponents(ma, mb);
  if (!ma.is_one() || !mb.is_one()) {
    Poly ra = a.div_monomial(ma), rb = b.div_monomial(mb);
    return gcd_reduced(ra, rb).mul_monomial(mg).monic();
  }
  if (a.size() == b.size() && a.monic() == b.monic()) return a.monic();
  std::uint32_t sa = a.support(), sb = b.support();
  if (sa & ~sb) return gcd_reduced(content_over(a, sa & ~sb), b);
  if (sb & ~sa) return gcd_reduced(a, content_over(b, sb & ~sa));
  const Poly& small = a.size() <= b.size() ? a : b;
  const Poly& large = a.size() <= b.size() ? b : a;
  if (divide_exact(large, small)) return small.monic();
  if (auto g = heuristic_gcd(primitive_integer(a), primitive_integer(b))) return g->monic();
  return prs_gcd(a, b, static_cast<std::size_t>(top_variable(sa)));
}

}  // namespace

Poly gcd(const Poly& a, const Poly& b) { return gcd_reduced(a, b); }

std::optional<Rational> sqrt_exact(const Rational& q) {
  if (sgn(q) < 0) return std::nullopt;
  Integer n = q.get_num(), d = q.get_den();
  if (!mpz_perfect_square_p(n.get_mpz_t()) || !mpz_perfect_square_p(d.get_mpz_t())) return std::nullopt;
  Integer rn, rd;
  mpz_sqrt(rn.get_mpz_t(), n.get_mpz_t());
  mpz_sqrt(rd.get_mpz_t(), d.get_mpz_t());
  return Rational(rn, rd);
}

std::optional<Poly> sqrt_exact(const Poly& p) {
  if (p.is_zero()) return Poly();
  const Term& lt = p.leading();
  Monomial root_mono;
  for (std::size_t i = 0; i < kMaxVars; ++i) {
    if (lt.mono.exp[i] % 2) return std::nullopt;
    root_mono.exp[i] = lt.mono.exp[i] / 2;
  }
  root_mono.deg = lt.mono.deg / 2;
  auto rc = sqrt_exact(lt.coef);
  if (!rc) return std::nullopt;
  Term first{root_mono, *rc};
  Poly root = Poly::monomial(first.mono, first.coef);
  Poly rem = p - root * root;
  Rational inv2 = Rational(1) / (2 * first.coef);
  while (!rem.is_zero()) {
    const Term& rt = rem.leading();
    if (!first.mono.divides(rt.mono)) return std::nullopt;
    Monomial q = quotient(rt.mono, first.mono);
    if (compare(q, first.mono) >= 0) return std::nullopt;
    Poly t = Poly::monomial(q, rt.coef * inv2);
    rem -= t * (root.scaled(2) + t);
    root += t;
  }
  return root;
}

std::string to_string(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

std::string to_string(const Poly& p, std::span<const std::string> names) {
  if (p.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& t : p.terms()) {
    Rational c = t.coef;
    bool neg = sgn(c) < 0;
    if (neg) c = -c;
    if (first) {
      if (neg) os << "-";
    } else {
      os << (neg ? " - " : " + ");
    }
    first = false;
    bool need_star = false;
    if (c != 1 || t.mono.is_one()) {
      os << to_string(c);
      need_star = true;
    }
    for (std::size_t i = 0; i < kMaxVars; ++i) {
      if (!t.mono.exp[i]) continue;
      if (need_star) os << "*";
      os << names[i];
      if (t.mono.exp[i] > 1) os << "^" << t.mono.exp[i];
      need_star = true;
    }
  }
  return os.str();
}

}  // namespace miura
