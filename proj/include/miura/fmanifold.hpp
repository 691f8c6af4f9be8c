#pragma once

#include <optional>
#include <string>
#include <vector>

#include "miura/systems.hpp"

namespace miura {

/// Flat F-manifold in flat coordinates, given by polynomials A^i with
/// structure constants c^i_{jk} = ∂_j ∂_k A^i.
struct VectorPotential {
  std::string name;
  NameTable names;
  std::vector<std::pair<std::string, Rational>> fixed_params;
  std::vector<RatFunc> components;
  int unity = 0;  // index of the coordinate whose vector field is the unit

  Layout layout() const { return names.layout(); }
  int dimension() const { return static_cast<int>(components.size()); }
  std::size_t var(int i) const { return static_cast<std::size_t>(layout().field_var(i)); }
};

/// c[i][j][k] = c^i_{jk}.
using StructureConstants = std::vector<RatMatrix>;

struct CheckResult {
  bool ok = true;
  /// Nonzero residuals with a label each.
  std::vector<std::pair<std::string, RatFunc>> residuals;
  double max_numeric_residual = 0.0;
};

StructureConstants structure_constants(const VectorPotential& v);
CheckResult check_unity(const VectorPotential& v);
CheckResult check_oriented_associativity(const VectorPotential& v);

struct FrobeniusResult {
  CheckResult closedness;
  CheckResult invariance;
  /// Scalar potential with ∂_i F = η_{il} A^l, when closed.
  std::optional<RatFunc> potential;
  bool ok() const { return closedness.ok && invariance.ok; }
};
FrobeniusResult check_frobenius(const VectorPotential& v, const RationalMatrix& eta);

/// X_{(p,l)} with p 1-based; X_{(p,0)} = ∂_p and ∂_j X_{(p,l+1)} = c^i_{jk} X^k_{(p,l)},
/// normalized by X_{(p,l+1)}(0) = 0.
std::vector<RatFunc> hierarchy_field(const VectorPotential& v, int p, int l);
/// Conservation-law flow u_t = ∂_x X_{(p,l+1)}.
EvolutionarySystem hierarchy_flow(const VectorPotential& v, int p, int l);

/// Integrates the closed polynomial 1-form Σ_j w_j du^j (over fields) along the
/// straight path from the origin. Throws IncompatibilityError if it is not closed.
RatFunc integrate_closed_form(const std::vector<RatFunc>& w, Layout layout);

/// Catalog groups: "B2", "B3", "B4", "I2". `c` unset means symbolic c.
/// For I2, `m` is required; with `doubled_m` the exponent convention m -> 2m is used.
VectorPotential catalog_potential(const std::string& group, std::optional<Rational> c, int m = 0, bool doubled_m = false);

/// I2(m) for odd m has half-integer powers; associativity is checked numerically at sample points.
CheckResult check_i2_odd_associativity(int m, const Rational& c, const std::vector<std::pair<double, double>>& points);

struct DiagonalSystem {
  NameTable names;
  std::vector<RatFunc> velocities;
};
CheckResult tsarev_check(const DiagonalSystem& d);

struct RiemannCheckResult {
  bool diagonal = false;
  /// Characteristic velocities in the original coordinates.
  std::vector<RatFunc> velocities;
  RatMatrix transformed;
};
RiemannCheckResult riemann_invariant_check(const EvolutionarySystem& sys, const std::vector<RatFunc>& coords);

}  // namespace miura
