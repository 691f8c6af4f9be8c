#pragma once

#include <optional>
#include <span>
#include <vector>

#include "miura/systems.hpp"

namespace miura {

enum class Mode { Exact, Numeric };

/// Eigenvalue series λ_i(z) = Σ_k λ_i^(k) z^k of the quasilinear symbol, z = εp.
struct InvariantSeries {
  Mode mode = Mode::Exact;
  int order = 0;
  std::vector<std::vector<RatFunc>> exact;   // [eigenvalue][power of z]
  std::vector<std::vector<double>> numeric;  // [eigenvalue][power of z]
  std::vector<double> point;                 // field values (numeric mode)
  double max_relative_residual = 0.0;
};

/// Exact mode needs the z^0 eigenvalues to be rational functions (2x2
/// symbols with a square discriminant, or triangular symbols); otherwise a
/// FormError is raised and numeric mode should be used.
InvariantSeries miura_invariant_series(const EvolutionarySystem& sys, Mode mode,
                                       std::span<const Rational> point = {});

/// Exact characteristic-polynomial residual det(M(z) − λ_i(z) I) mod z^{N+1}.
std::vector<std::vector<RatFunc>> invariant_residual(const EvolutionarySystem& sys, const InvariantSeries& inv);

struct GaussianRational {
  Rational re;
  Rational im;
  friend bool operator==(const GaussianRational&, const GaussianRational&) = default;
};

/// ω_j(k) = −k λ_j(u0, ik), coefficients indexed by powers of k up to kmax_order.
std::vector<std::vector<GaussianRational>> dispersion_relations(const EvolutionarySystem& sys, std::span<const Rational> u0,
                                                                int kmax_order);

std::string to_string(const std::vector<GaussianRational>& poly_in_k);

}  // namespace miura
