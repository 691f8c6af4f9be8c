#include "miura/ratfunc.hpp"

#include "miura/errors.hpp"

namespace miura {

RatFunc::RatFunc(const Poly& num, const Poly& den) {
  if (den.is_zero()) throw PoleError("rational function with zero denominator");
  if (num.is_zero()) {
    den_ = Poly(1);
    return;
  }
  if (den.is_constant()) {
    num_ = num.scaled(Rational(1) / den.constant_value());
    den_ = Poly(1);
    return;
  }
  Poly g = gcd(num, den);
  if (g.is_one()) {
    num_ = num;
    den_ = den;
  } else {
    num_ = divide_exact(num, g).value();
    den_ = divide_exact(den, g).value();
  }
  normalize_sign();
}

void RatFunc::normalize_sign() {
  const Rational lc = den_.leading().coef;
  if (lc != 1) {
    Rational inv = Rational(1) / lc;
    num_ = num_.scaled(inv);
    den_ = den_.scaled(inv);
  }
}

RatFunc RatFunc::operator-() const {
  RatFunc r = *this;
  r.num_ = -r.num_;
  return r;
}

RatFunc& RatFunc::operator+=(const RatFunc& o) {
  if (o.is_zero()) return *this;
  if (is_zero()) return *this = o;
  if (den_ == o.den_) {
    if (den_.is_one()) {
      num_ += o.num_;
      return *this;
    }
    return *this = RatFunc(num_ + o.num_, den_);
  }
  if (o.den_.is_one()) {
    num_ += o.num_ * den_;
    if (num_.is_zero()) den_ = Poly(1);
    return *this;
  }
  if (den_.is_one()) {
    num_ = num_ * o.den_ + o.num_;
    den_ = o.den_;
    if (num_.is_zero()) den_ = Poly(1);
    return *this;
  }
  Poly g = gcd(den_, o.den_);
  if (g.is_one()) return *this = RatFunc(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
  Poly d1 = divide_exact(den_, g).value();
  Poly d2 = divide_exact(o.den_, g).value();
  Poly n = num_ * d2 + o.num_ * d1;
  if (n.is_zero()) return *this = RatFunc();
  Poly h = gcd(n, g);
  if (!h.is_one()) {
    n = divide_exact(n, h).value();
    g = divide_exact(g, h).value();
  }
  num_ = std::move(n);
  den_ = d1 * d2 * g;
  normalize_sign();
  return *this;
}

RatFunc& RatFunc::operator-=(const RatFunc& o) { return *this += -o; }

RatFunc& RatFunc::operator*=(const RatFunc& o) {
  if (is_zero() || o.is_zero()) return *this = RatFunc();
  if (den_.is_one() && o.den_.is_one()) {
    num_ *= o.num_;
    return *this;
  }
  Poly a = num_, b = den_, c = o.num_, d = o.den_;
  if (!d.is_one()) {
    Poly g = gcd(a, d);
    if (!g.is_one()) {
      a = divide_exact(a, g).value();
      d = divide_exact(d, g).value();
    }
  }
  if (!b.is_one()) {
    Poly g = gcd(c, b);
    if (!g.is_one()) {
      c = divide_exact(c, g).value();
      b = divide_exact(b, g).value();
    }
  }
  num_ = a * c;
  den_ = b * d;
  normalize_sign();
  return *this;
}

RatFunc RatFunc::inverse() const {
  if (is_zero()) throw PoleError("division by zero rational function");
  RatFunc r;
  r.num_ = den_;
  r.den_ = num_;
  r.normalize_sign();
  return r;
}

RatFunc& RatFunc::operator/=(const RatFunc& o) { return *this *= o.inverse(); }

RatFunc RatFunc::pow(int e) const {
  if (e < 0) return inverse().pow(-e);
  RatFunc r;
  r.num_ = num_.pow(static_cast<unsigned>(e));
  r.den_ = den_.pow(static_cast<unsigned>(e));
  return r;
}

RatFunc RatFunc::derivative(std::size_t var) const {
  if (den_.is_one()) return RatFunc(num_.derivative(var));
  Poly dn = num_.derivative(var);
  Poly dd = den_.derivative(var);
  if (dd.is_zero()) return RatFunc(dn, den_);
  return RatFunc(dn * den_ - num_ * dd, den_ * den_);
}

RatFunc RatFunc::scaled(const Rational& c) const {
  if (sgn(c) == 0) return RatFunc();
  RatFunc r = *this;
  r.num_ = r.num_.scaled(c);
  return r;
}

RatFunc RatFunc::evaluate(std::size_t var, const Rational& value) const {
  Poly d = den_.evaluate(var, value);
  if (d.is_zero()) throw PoleError("pole at substituted value " + to_string(value));
  return RatFunc(num_.evaluate(var, value), d);
}

Rational RatFunc::evaluate(std::span<const Rational> point) const {
  Rational d = den_.evaluate(point);
  if (sgn(d) == 0) throw PoleError("pole at evaluation point");
  return num_.evaluate(point) / d;
}

double RatFunc::evaluate_double(std::span<const double> point) const {
  double d = den_.evaluate_double(point);
  if (d == 0.0) throw PoleError("pole at evaluation point");
  return num_.evaluate_double(point) / d;
}

std::string to_string(const RatFunc& f, std::span<const std::string> names) {
  if (f.is_polynomial()) return to_string(f.num(), names);
  return "(" + to_string(f.num(), names) + ")/(" + to_string(f.den(), names) + ")";
}

}  // namespace miura

namespace miura {

namespace {

RatFunc compose_poly(const Poly& p, std::span<const RatFunc> images) {
  std::vector<std::vector<RatFunc>> powers(kMaxVars);
  RatFunc sum;
  for (const auto& t : p.terms()) {
    RatFunc v(t.coef);
    for (std::size_t i = 0; i < kMaxVars; ++i) {
      unsigned e = t.mono.exp[i];
      if (!e) continue;
      auto& pw = powers[i];
      if (pw.empty()) pw.push_back(RatFunc(1));
      while (pw.size() <= e) pw.push_back(pw.back() * images[i]);
      v *= pw[e];
    }
    sum += v;
  }
  return sum;
}

}  // namespace

RatFunc compose(const RatFunc& f, std::span<const RatFunc> images) {
  RatFunc d = compose_poly(f.den(), images);
  if (d.is_zero()) throw PoleError("denominator vanishes after substitution");
  return compose_poly(f.num(), images) / d;
}

}  // namespace miura
