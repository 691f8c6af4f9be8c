#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "miura/dsl.hpp"
#include "miura/fmanifold.hpp"

namespace miura {

using PluginMap = std::map<std::string, Plugin>;

/// A deformation case: which catalog potential, which dispersionless flow is
/// deformed and which hierarchy flow serves as the symmetry to extend.
struct DeformationCase {
  std::string name;
  std::string group;  // "B2" or "I2"
  Rational c;
  int m = 0;  // I2 exponent in the doubled convention (theorem m)
  std::optional<int> sign;  // i2_cpm2: c = 2*sign
  std::vector<std::string> plugins;
  std::pair<int, int> flow;
  std::pair<int, int> symmetry;

  VectorPotential potential() const;
};

std::vector<std::string> deformation_case_names();
/// Resolves parameters and checks them against the case preconditions.
/// b2_generic defaults to c = 1/4, i2_* default to m = 2 (i2_generic: c = 4, i2_cpm2: c = 2).
DeformationCase deformation_case(const std::string& name, std::optional<Rational> c = std::nullopt,
                                 std::optional<int> m = std::nullopt);

/// Plugins missing from `plugins` are zero; names outside the case are rejected.
EvolutionarySystem build_deformation(const DeformationCase& dc, const PluginMap& plugins);

/// Symmetry data: h for the families generated by one potential, f and g
/// (g a function of v) for the degenerate B2 cases.
struct SymmetryData {
  std::optional<RatFunc> h;
  std::optional<RatFunc> f;
  std::optional<RatFunc> g;
};

/// Residual of the defining PDE of the case's symmetry family (zero when valid).
RatFunc symmetry_equation_residual(const DeformationCase& dc, const SymmetryData& data);
/// Symmetry flow from validated data; for b2_frobenius it carries the
/// second-order corrections determined by the plugins, otherwise it is dispersionless.
EvolutionarySystem build_symmetry(const DeformationCase& dc, const SymmetryData& data, const PluginMap& plugins = {});

/// Solves {alpha, beta0 + eps beta1 + eps^2 beta2} = 0 for the corrections
/// beta_k with Laurent polynomial coefficients. `seed` is dispersionless.
/// Throws FormError if no such extension is found.
EvolutionarySystem extend_symmetry(const EvolutionarySystem& sys, const EvolutionarySystem& seed);

/// Deformed symmetries used to certify the case (closed forms for
/// b2_frobenius, extend_symmetry of the hierarchy flow otherwise).
std::vector<EvolutionarySystem> case_symmetries(const DeformationCase& dc, const PluginMap& plugins);

struct BracketCheck {
  std::string label;
  bool ok = true;
  std::string residual;
};

struct IntegrabilityReport {
  bool ok = true;
  int order = 0;
  std::vector<BracketCheck> checks;
};

IntegrabilityReport verify_integrability(const EvolutionarySystem& sys, const std::vector<EvolutionarySystem>& symmetries);

/// a + Σ_{j,l} dM[j][l] ∂_l M_j = 0 for the unknown functions M_j of the fields.
struct TrivialityConstraint {
  std::string label;
  int component = 0;
  int field = 0;
  RatFunc inhomogeneous;
  std::vector<std::vector<RatFunc>> dM;
};

struct TrivialitySystem {
  NameTable names;
  std::vector<TrivialityConstraint> constraints;
};

/// Conditions on w = u + eps D_x M(u) removing the eps^1 part of the currents.
TrivialitySystem triviality_system(const EvolutionarySystem& sys);

struct TrivialityResult {
  enum class Status { Trivialized, Obstructed, Inconclusive };
  Status status = Status::Inconclusive;
  std::vector<RatFunc> M;
  /// Obstruction: Σ multipliers[c] * constraint[c] has no derivative terms
  /// and equals `obstruction` (nonzero).
  std::vector<RatFunc> multipliers;
  RatFunc obstruction;
};

TrivialityResult solve_triviality(const TrivialitySystem& tps, int max_degree);
/// Residual of each constraint at the given M.
std::vector<RatFunc> triviality_residuals(const TrivialitySystem& tps, const std::vector<RatFunc>& M);

std::string to_string(TrivialityResult::Status s);

}  // namespace miura
