#pragma once

#include "miura/diffpoly.hpp"

#include <optional>
#include <vector>

namespace miura {

/// Truncated series Σ_{k<=N} ε^k c_k. When `offset` is set, c_k must be
/// homogeneous of differential degree k + offset (0 for currents and
/// Miura data, 1 for evolution right-hand sides).
class EpsSeries {
 public:
  EpsSeries() = default;
  EpsSeries(Layout layout, int order, std::optional<int> offset = 0);
  /// Validates the grading; throws FormError on violation.
  EpsSeries(std::vector<DiffPoly> coeffs, int order, std::optional<int> offset);
  static EpsSeries constant(const DiffPoly& c0, int order, std::optional<int> offset);

  const Layout& layout() const { return layout_; }
  int order() const { return order_; }
  std::optional<int> offset() const { return offset_; }
  const DiffPoly& operator[](int k) const { return coeffs_[static_cast<std::size_t>(k)]; }
  const std::vector<DiffPoly>& coefficients() const { return coeffs_; }
  bool is_zero() const;

  /// Replaces coefficient k (checked against the grading).
  void set(int k, DiffPoly c);
  void add(int k, const DiffPoly& c);

  EpsSeries operator-() const;
  EpsSeries& operator+=(const EpsSeries& o);
  EpsSeries& operator-=(const EpsSeries& o);
  friend EpsSeries operator+(EpsSeries a, const EpsSeries& b) { return a += b; }
  friend EpsSeries operator-(EpsSeries a, const EpsSeries& b) { return a -= b; }
  friend EpsSeries operator*(const EpsSeries& a, const EpsSeries& b);
  friend EpsSeries operator*(const RatFunc& c, const EpsSeries& a);
  friend bool operator==(const EpsSeries& a, const EpsSeries& b);
  friend bool operator!=(const EpsSeries& a, const EpsSeries& b) { return !(a == b); }

  template <typename Fn>
  EpsSeries map(Fn fn, std::optional<int> offset) const {
    EpsSeries out(layout_, order_, offset);
    for (int k = 0; k <= order_; ++k) out.set(k, fn(coeffs_[static_cast<std::size_t>(k)]));
    return out;
  }

 private:
  void check(int k, const DiffPoly& c) const;
  Layout layout_;
  int order_ = 0;
  std::optional<int> offset_ = 0;
  std::vector<DiffPoly> coeffs_;
};

EpsSeries series_truncate(const EpsSeries& s, int order);
EpsSeries total_x_derivative(const EpsSeries& s);
EpsSeries partial_jet_derivative(const EpsSeries& s, JetVar x);
/// Shifts the grading offset (e.g. currents -> right-hand sides after D_x).
EpsSeries with_offset(const EpsSeries& s, std::optional<int> offset);

/// Substitutes u^i_(s) -> D_x^s bindings[i] into f (Taylor-expanding the
/// rational coefficients around the ε^0 parts of the bindings). The ε^0
/// part of every binding must be jet-free. The result has the smallest
/// truncation order among the bindings.
EpsSeries substitute(const DiffPoly& f, std::span<const EpsSeries> bindings);
EpsSeries substitute(const EpsSeries& s, std::span<const EpsSeries> bindings);

/// Identity bindings u^i -> u^i for the given layout.
std::vector<EpsSeries> identity_bindings(Layout layout, int order);

std::string to_string(const EpsSeries& s, const NameTable& names);

}  // namespace miura
