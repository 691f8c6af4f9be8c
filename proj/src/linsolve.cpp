#include "miura/linsolve.hpp"

#include "miura/errors.hpp"

namespace miura {

void SparseLinearSystem::add_equation(SparseRow row, Rational constant) {
  for (auto it = row.begin(); it != row.end();) {
    if (it->first >= nvars_) throw DimensionError("equation refers to an unknown out of range");
    if (sgn(it->second) == 0) it = row.erase(it);
    else ++it;
  }
  // Eliminate existing pivots; each pivot row only holds columns that were
  // free when it was stored, so repeated passes terminate.
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto it = row.begin(); it != row.end();) {
      std::size_t p = pivot_of_[it->first];
      if (p == kNone) {
        ++it;
        continue;
      }
      Rational factor = it->second;
      const Pivot& pv = pivots_[p];
      it = row.erase(it);
      for (const auto& [col, c] : pv.row) {
        if (col == pv.col) continue;
        Rational& slot = row[col];
        slot -= factor * c;
        if (sgn(slot) == 0) row.erase(col);
      }
      constant -= factor * pv.constant;
      changed = true;
      break;
    }
  }
  if (row.empty()) {
    if (sgn(constant) != 0) consistent_ = false;
    return;
  }
  // Prefer the column with the simplest coefficient as pivot.
  auto best = row.begin();
  for (auto it = row.begin(); it != row.end(); ++it)
    if (mpz_sizeinbase(it->second.get_num_mpz_t(), 2) + mpz_sizeinbase(it->second.get_den_mpz_t(), 2) <
        mpz_sizeinbase(best->second.get_num_mpz_t(), 2) + mpz_sizeinbase(best->second.get_den_mpz_t(), 2))
      best = it;
  std::size_t col = best->first;
  Rational inv = Rational(1) / best->second;
  for (auto& [c, v] : row) v *= inv;
  constant *= inv;
  pivot_of_[col] = pivots_.size();
  pivots_.push_back({col, std::move(row), constant});
}

std::vector<Rational> SparseLinearSystem::back_substitute(std::vector<Rational> x, bool homogeneous) const {
  for (std::size_t k = pivots_.size(); k-- > 0;) {
    const Pivot& pv = pivots_[k];
    Rational s = homogeneous ? Rational(0) : pv.constant;
    for (const auto& [col, c] : pv.row)
      if (col != pv.col && sgn(x[col]) != 0) s += c * x[col];
    x[pv.col] = -s;
  }
  return x;
}

std::optional<std::vector<Rational>> SparseLinearSystem::solve() const {
  if (!consistent_) return std::nullopt;
  return back_substitute(std::vector<Rational>(nvars_), false);
}

std::vector<std::vector<Rational>> SparseLinearSystem::nullspace() const {
  std::vector<std::vector<Rational>> basis;
  for (std::size_t j = 0; j < nvars_; ++j) {
    if (pivot_of_[j] != kNone) continue;
    std::vector<Rational> x(nvars_);
    x[j] = 1;
    basis.push_back(back_substitute(std::move(x), true));
  }
  return basis;
}

}  // namespace miura
