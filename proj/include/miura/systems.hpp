#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "miura/series.hpp"

namespace miura {

using RationalMatrix = std::vector<std::vector<Rational>>;
using RatMatrix = std::vector<std::vector<RatFunc>>;

/// u^i_t = rhs^i, optionally in conservation form rhs^i = D_x currents^i.
struct EvolutionarySystem {
  std::string name;
  NameTable names;
  /// Parameters fixed to rational values (symbolic ones live in names.params).
  std::vector<std::pair<std::string, Rational>> fixed_params;
  int order = 0;
  std::vector<EpsSeries> rhs;
  std::optional<std::vector<EpsSeries>> currents;

  Layout layout() const { return names.layout(); }
  int nfields() const { return static_cast<int>(names.fields.size()); }
  bool conservation_form() const { return currents.has_value(); }

  /// Validates grading and jet-freeness of the ε^0 currents.
  static EvolutionarySystem from_currents(std::string name, NameTable names, std::vector<EpsSeries> currents);
  static EvolutionarySystem from_rhs(std::string name, NameTable names, std::vector<EpsSeries> rhs);
};

/// w = L u + s + Σ_k ε^k F_k(u). When potentials are present, F_k = D_x β_k.
struct MiuraTransform {
  Layout layout;
  int order = 0;
  RationalMatrix leading;
  std::vector<Rational> shift;
  std::vector<EpsSeries> tails;
  std::optional<std::vector<EpsSeries>> potentials;

  int nfields() const { return layout.nfields; }
  static MiuraTransform identity(Layout layout, int order);
  /// w = u + Σ ε^k D_x β_k.
  static MiuraTransform from_potentials(std::vector<EpsSeries> potentials, int order);
  /// w = L u + s + tails; validates invertibility of L and the grading of tails.
  static MiuraTransform general(Layout layout, int order, RationalMatrix leading, std::vector<Rational> shift,
                                std::vector<EpsSeries> tails);
  /// Full map as series in u (one per field).
  std::vector<EpsSeries> forward() const;
};

/// Connection data for the general bracket: contravariant metric g^{ij} and
/// Christoffel symbols gamma[j][l][k] = Γ^j_{lk}.
struct FlatConnectionData {
  RatMatrix g;
  std::vector<RatMatrix> gamma;
};

/// The result keeps the order of `sys`; `m` is padded with zero tails or truncated to match.
EvolutionarySystem apply_miura(const EvolutionarySystem& sys, const MiuraTransform& m);
MiuraTransform invert_miura(const MiuraTransform& m);
/// The transform "first a, then b".
MiuraTransform compose(const MiuraTransform& a, const MiuraTransform& b);

using FormList = std::vector<EpsSeries>;

FormList bracket_flat(const FormList& alpha, const FormList& beta);
FormList bracket_general(const FormList& alpha, const FormList& beta, const FlatConnectionData& conn);
/// u_{t_A t_B} − u_{t_B t_A} via evolutionary prolongation.
FormList commutator_direct(const EvolutionarySystem& a, const EvolutionarySystem& b);
bool all_zero(const FormList& forms);

/// D_X f = Σ ∂f/∂u^j_(s) D_x^s X^j, truncated at the smaller order.
EpsSeries evolutionary_derivative(const EpsSeries& f, const std::vector<EpsSeries>& x);

/// Coefficient matrices M_k (k = 0..N) of the quasilinear symbol
/// M(u, z) = Σ z^k M_k, z = εp: M_k[i][j] multiplies u^j_(k+1) in the ε^k part of rhs^i.
std::vector<RatMatrix> quasilinear_part(const EvolutionarySystem& sys);

RationalMatrix inverse(const RationalMatrix& m);

/// w = u + Σ_k ε^k F_k with F_k a random polynomial of differential degree k
/// and coefficients of degree <= max_degree in the fields (small integers).
MiuraTransform random_miura(Layout layout, int order, int max_degree, std::uint64_t seed);

}  // namespace miura
