#include "miura/series.hpp"

#include <map>

#include "miura/errors.hpp"

namespace miura {

EpsSeries::EpsSeries(Layout layout, int order, std::optional<int> offset)
    : layout_(layout), order_(order), offset_(offset), coeffs_(static_cast<std::size_t>(order + 1), DiffPoly(layout)) {
  if (order < 0) throw FormError("negative truncation order");
}

EpsSeries::EpsSeries(std::vector<DiffPoly> coeffs, int order, std::optional<int> offset)
    : order_(order), offset_(offset) {
  if (order < 0) throw FormError("negative truncation order");
  if (!coeffs.empty()) layout_ = coeffs.front().layout();
  coeffs_.assign(static_cast<std::size_t>(order + 1), DiffPoly(layout_));
  for (std::size_t k = 0; k < coeffs.size() && k <= static_cast<std::size_t>(order); ++k)
    set(static_cast<int>(k), std::move(coeffs[k]));
}

EpsSeries EpsSeries::constant(const DiffPoly& c0, int order, std::optional<int> offset) {
  EpsSeries s(c0.layout(), order, offset);
  s.set(0, c0);
  return s;
}

bool EpsSeries::is_zero() const {
  for (const auto& c : coeffs_)
    if (!c.is_zero()) return false;
  return true;
}

void EpsSeries::check(int k, const DiffPoly& c) const {
  if (offset_ && !c.is_homogeneous(k + *offset_))
    throw FormError("coefficient of eps^" + std::to_string(k) + " is not homogeneous of differential degree " +
                    std::to_string(k + *offset_));
}

void EpsSeries::set(int k, DiffPoly c) {
  if (k > order_) return;
  check(k, c);
  coeffs_[static_cast<std::size_t>(k)] = std::move(c);
}

void EpsSeries::add(int k, const DiffPoly& c) {
  if (k > order_) return;
  check(k, c);
  coeffs_[static_cast<std::size_t>(k)] += c;
}

EpsSeries EpsSeries::operator-() const {
  EpsSeries r = *this;
  for (auto& c : r.coeffs_) c = -c;
  return r;
}

namespace {

std::optional<int> common_offset(std::optional<int> a, std::optional<int> b) {
  return a == b ? a : std::nullopt;
}

}  // namespace

EpsSeries& EpsSeries::operator+=(const EpsSeries& o) {
  if (o.order_ < order_) {
    order_ = o.order_;
    coeffs_.resize(static_cast<std::size_t>(order_ + 1));
  }
  offset_ = common_offset(offset_, o.offset_);
  for (int k = 0; k <= order_; ++k) coeffs_[static_cast<std::size_t>(k)] += o.coeffs_[static_cast<std::size_t>(k)];
  return *this;
}

EpsSeries& EpsSeries::operator-=(const EpsSeries& o) { return *this += -o; }

EpsSeries operator*(const EpsSeries& a, const EpsSeries& b) {
  int n = std::min(a.order_, b.order_);
  std::optional<int> off;
  if (a.offset_ && b.offset_) off = *a.offset_ + *b.offset_;
  EpsSeries out(a.layout_, n, off);
  for (int i = 0; i <= n; ++i) {
    if (a[i].is_zero()) continue;
    for (int j = 0; i + j <= n; ++j) {
      if (b[j].is_zero()) continue;
      out.coeffs_[static_cast<std::size_t>(i + j)] += a[i] * b[j];
    }
  }
  return out;
}

EpsSeries operator*(const RatFunc& c, const EpsSeries& a) {
  EpsSeries out = a;
  for (auto& x : out.coeffs_) x = c * x;
  return out;
}

bool operator==(const EpsSeries& a, const EpsSeries& b) {
  int n = std::max(a.order_, b.order_);
  for (int k = 0; k <= n; ++k) {
    bool za = k > a.order_ || a[k].is_zero();
    bool zb = k > b.order_ || b[k].is_zero();
    if (za && zb) continue;
    if (za != zb || a[k] != b[k]) return false;
  }
  return a.order_ == b.order_;
}

EpsSeries series_truncate(const EpsSeries& s, int order) {
  if (order < 0) throw FormError("negative truncation order");
  EpsSeries out(s.layout(), order, s.offset());
  for (int k = 0; k <= std::min(order, s.order()); ++k) out.set(k, s[k]);
  return out;
}

EpsSeries total_x_derivative(const EpsSeries& s) {
  std::optional<int> off;
  if (s.offset()) off = *s.offset() + 1;
  return s.map([](const DiffPoly& c) { return total_x_derivative(c); }, off);
}

EpsSeries partial_jet_derivative(const EpsSeries& s, JetVar x) {
  std::optional<int> off;
  if (s.offset()) off = *s.offset() - x.order;
  return s.map([&](const DiffPoly& c) { return partial_jet_derivative(c, x); }, off);
}

EpsSeries with_offset(const EpsSeries& s, std::optional<int> offset) {
  return s.map([](const DiffPoly& c) { return c; }, offset);
}

namespace {

class Substituter {
 public:
  Substituter(Layout layout, std::span<const EpsSeries> bindings) : layout_(layout), bindings_(bindings) {
    if (static_cast<int>(bindings.size()) < layout.nfields) throw FormError("missing binding for a field");
    order_ = bindings.empty() ? 0 : bindings[0].order();
    for (const auto& b : bindings) order_ = std::min(order_, b.order());
    images_.resize(static_cast<std::size_t>(layout.nvars()));
    for (int v = 0; v < layout.nparams; ++v) images_[static_cast<std::size_t>(v)] = RatFunc::variable(static_cast<std::size_t>(v));
    identity_ = true;
    for (int i = 0; i < layout.nfields; ++i) {
      const EpsSeries& b = bindings[static_cast<std::size_t>(i)];
      if (!b[0].is_jet_free()) throw FormError("binding has jet-dependent leading part");
      RatFunc g = b[0].jet_free_part();
      images_[static_cast<std::size_t>(layout.field_var(i))] = g;
      if (g != RatFunc::variable(static_cast<std::size_t>(layout.field_var(i)))) identity_ = false;
      EpsSeries d = series_truncate(b, order_);
      d.set(0, DiffPoly(layout));
      deltas_.push_back(std::move(d));
    }
  }

  int order() const { return order_; }

  EpsSeries apply(const DiffPoly& f) {
    EpsSeries out(layout_, order_, std::nullopt);
    for (const auto& [m, c] : f.terms()) {
      EpsSeries t = coefficient(c);
      for (const auto& fac : m.factors()) {
        const EpsSeries& j = jet(fac.field, fac.order);
        for (int p = 0; p < fac.power; ++p) t = t * j;
      }
      out += t;
    }
    return out;
  }

 private:
  const EpsSeries& jet(int field, int order) {
    auto key = std::make_pair(field, order);
    auto it = jets_.find(key);
    if (it != jets_.end()) return it->second;
    EpsSeries s = order == 0 ? with_offset(series_truncate(bindings_[static_cast<std::size_t>(field)], order_), std::nullopt)
                             : total_x_derivative(jet(field, order - 1));
    return jets_.emplace(key, std::move(s)).first->second;
  }

  const EpsSeries& delta_power(int field, int power) {
    auto key = std::make_pair(field, power);
    auto it = delta_powers_.find(key);
    if (it != delta_powers_.end()) return it->second;
    EpsSeries s = power == 0 ? EpsSeries::constant(DiffPoly(layout_, RatFunc(1)), order_, std::nullopt)
                             : delta_power(field, power - 1) * with_offset(deltas_[static_cast<std::size_t>(field)], std::nullopt);
    return delta_powers_.emplace(key, std::move(s)).first->second;
  }

  RatFunc at_leading(const RatFunc& c) const { return identity_ ? c : compose(c, images_); }

  /// Taylor expansion of c(g + δ) in the fields from index i on.
  EpsSeries taylor(const RatFunc& c, int i) {
    if (i == layout_.nfields) return EpsSeries::constant(DiffPoly(layout_, at_leading(c)), order_, std::nullopt);
    EpsSeries out(layout_, order_, std::nullopt);
    RatFunc deriv = c;
    Rational factorial = 1;
    auto var = static_cast<std::size_t>(layout_.field_var(i));
    for (int a = 0; a <= order_ && !deriv.is_zero(); ++a) {
      if (a > 0) {
        deriv = deriv.derivative(var);
        factorial *= a;
        if (deriv.is_zero()) break;
      }
      const EpsSeries& dp = delta_power(i, a);
      if (a > 0 && dp.is_zero()) break;
      out += taylor(deriv.scaled(Rational(1) / factorial), i + 1) * dp;
    }
    return out;
  }

  EpsSeries coefficient(const RatFunc& c) { return taylor(c, 0); }

  Layout layout_;
  std::span<const EpsSeries> bindings_;
  int order_ = 0;
  bool identity_ = true;
  std::vector<RatFunc> images_;
  std::vector<EpsSeries> deltas_;
  std::map<std::pair<int, int>, EpsSeries> jets_;
  std::map<std::pair<int, int>, EpsSeries> delta_powers_;
};

std::optional<int> homogeneous_degree(const DiffPoly& f) {
  if (f.is_zero()) return 0;
  if (f.min_degree() == f.max_degree()) return f.min_degree();
  return std::nullopt;
}

}  // namespace

EpsSeries substitute(const DiffPoly& f, std::span<const EpsSeries> bindings) {
  Substituter sub(f.layout(), bindings);
  EpsSeries r = sub.apply(f);
  return with_offset(r, homogeneous_degree(f));
}

EpsSeries substitute(const EpsSeries& s, std::span<const EpsSeries> bindings) {
  Substituter sub(s.layout(), bindings);
  int n = std::min(sub.order(), s.order());
  EpsSeries out(s.layout(), n, std::nullopt);
  for (int k = 0; k <= n; ++k) {
    if (s[k].is_zero()) continue;
    EpsSeries t = sub.apply(s[k]);
    for (int j = 0; j + k <= n; ++j) out.add(j + k, t[j]);
  }
  return with_offset(out, s.offset());
}

std::vector<EpsSeries> identity_bindings(Layout layout, int order) {
  std::vector<EpsSeries> out;
  for (int i = 0; i < layout.nfields; ++i) out.push_back(EpsSeries::constant(DiffPoly::jet(layout, i, 0), order, 0));
  return out;
}

std::string to_string(const EpsSeries& s, const NameTable& names) {
  std::string out;
  for (int k = 0; k <= s.order(); ++k) {
    if (s[k].is_zero()) continue;
    std::string body = to_string(s[k], names);
    if (!out.empty()) out += " + ";
    if (k == 0) {
      out += body;
    } else {
      out += (k == 1 ? std::string("eps") : "eps^" + std::to_string(k)) + "*(" + body + ")";
    }
  }
  return out.empty() ? "0" : out;
}

}  // namespace miura
