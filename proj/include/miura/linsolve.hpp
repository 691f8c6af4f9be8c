#pragma once

#include <map>
#include <optional>
#include <vector>

#include "miura/poly.hpp"

namespace miura {

using SparseRow = std::map<std::size_t, Rational>;

/// Incremental Gaussian elimination over Q for sparse equations
/// Σ row[j]·x_j + constant = 0.
class SparseLinearSystem {
 public:
  explicit SparseLinearSystem(std::size_t nvars) : nvars_(nvars), pivot_of_(nvars, kNone) {}

  void add_equation(SparseRow row, Rational constant);
  bool consistent() const { return consistent_; }
  std::size_t rank() const { return pivots_.size(); }
  std::size_t nvars() const { return nvars_; }

  /// A solution with all free variables set to zero.
  std::optional<std::vector<Rational>> solve() const;
  /// Basis of the solution space of the homogeneous system.
  std::vector<std::vector<Rational>> nullspace() const;

 private:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  struct Pivot {
    std::size_t col;
    SparseRow row;  // coefficient 1 at col
    Rational constant;
  };
  std::vector<Rational> back_substitute(std::vector<Rational> x, bool homogeneous) const;

  std::size_t nvars_;
  std::vector<Pivot> pivots_;
  std::vector<std::size_t> pivot_of_;
  bool consistent_ = true;
};

}  // namespace miura
