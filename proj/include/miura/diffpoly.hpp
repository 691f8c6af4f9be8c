#pragma once

#include "miura/ratfunc.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace miura {

/// u^field_(order); order 0 is the base variable itself.
struct JetVar {
  int field = 0;
  int order = 0;
  friend auto operator<=>(const JetVar&, const JetVar&) = default;
};

struct JetFactor {
  std::uint8_t field;
  std::uint8_t order;  // >= 1
  std::uint8_t power;
  friend bool operator==(const JetFactor&, const JetFactor&) = default;
};

/// Product of jet variables of order >= 1, factors sorted by (field, order).
class JetMonomial {
 public:
  JetMonomial() = default;
  static JetMonomial single(int field, int order, int power = 1);

  const std::vector<JetFactor>& factors() const { return factors_; }
  bool is_one() const { return factors_.empty(); }
  int degree() const { return degree_; }
  int power_of(int field, int order) const;
  int max_order() const;

  JetMonomial operator*(const JetMonomial& o) const;
  /// Removes one power of (field, order); the factor must be present.
  JetMonomial without(int field, int order) const;
  JetMonomial with(int field, int order) const { return *this * single(field, order); }

  friend bool operator==(const JetMonomial& a, const JetMonomial& b) { return a.factors_ == b.factors_; }
  friend bool operator<(const JetMonomial& a, const JetMonomial& b);

 private:
  std::vector<JetFactor> factors_;
  int degree_ = 0;
};

/// Shape of the coefficient variable space: parameters occupy indices
/// [0, nparams) and base fields [nparams, nparams + nfields).
struct Layout {
  int nparams = 0;
  int nfields = 0;
  int field_var(int field) const { return nparams + field; }
  int nvars() const { return nparams + nfields; }
  friend bool operator==(const Layout&, const Layout&) = default;
};

/// Polynomial in jet variables with rational-function coefficients in the
/// parameters and base fields.
class DiffPoly {
 public:
  using TermMap = std::map<JetMonomial, RatFunc>;

  DiffPoly() = default;
  explicit DiffPoly(Layout layout) : layout_(layout) {}
  DiffPoly(Layout layout, const RatFunc& c);
  static DiffPoly jet(Layout layout, int field, int order);
  static DiffPoly param(Layout layout, int index);
  static DiffPoly term(Layout layout, const JetMonomial& m, const RatFunc& c);

  const Layout& layout() const { return layout_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  bool is_jet_free() const;
  /// Coefficient of the empty jet monomial.
  RatFunc jet_free_part() const;
  RatFunc coefficient(const JetMonomial& m) const;
  /// Maximal / minimal differential degree among terms (0 for zero).
  int max_degree() const;
  int min_degree() const;
  bool is_homogeneous(int d) const;
  int max_order() const;

  DiffPoly operator-() const;
  DiffPoly& operator+=(const DiffPoly& o);
  DiffPoly& operator-=(const DiffPoly& o);
  friend DiffPoly operator+(DiffPoly a, const DiffPoly& b) { return a += b; }
  friend DiffPoly operator-(DiffPoly a, const DiffPoly& b) { return a -= b; }
  friend DiffPoly operator*(const DiffPoly& a, const DiffPoly& b);
  friend DiffPoly operator*(const RatFunc& c, const DiffPoly& a);
  friend bool operator==(const DiffPoly& a, const DiffPoly& b) { return a.terms_ == b.terms_; }
  friend bool operator!=(const DiffPoly& a, const DiffPoly& b) { return !(a == b); }

  void add_term(const JetMonomial& m, const RatFunc& c);
  DiffPoly pow(unsigned e) const;
  DiffPoly homogeneous_part(int d) const;
  /// Applies `fn` to every coefficient, dropping zeros.
  template <typename Fn>
  DiffPoly map_coefficients(Fn fn) const {
    DiffPoly out(layout_);
    for (const auto& [m, c] : terms_) out.add_term(m, fn(c));
    return out;
  }

 private:
  Layout layout_;
  TermMap terms_;
};

DiffPoly total_x_derivative(const DiffPoly& f);
DiffPoly total_x_derivative(const DiffPoly& f, int times);
/// Formal partial derivative treating every jet variable as independent.
DiffPoly partial_jet_derivative(const DiffPoly& f, JetVar x);

/// Names used for printing and parsing.
struct NameTable {
  std::vector<std::string> params;
  std::vector<std::string> fields;
  Layout layout() const { return {static_cast<int>(params.size()), static_cast<int>(fields.size())}; }
  /// Coefficient variable names: parameters then fields.
  std::vector<std::string> coefficient_names() const;
};

std::string to_string(const DiffPoly& f, const NameTable& names);

}  // namespace miura
