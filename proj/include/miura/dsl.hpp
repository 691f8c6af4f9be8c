#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "miura/systems.hpp"

namespace miura {

/// Univariate polynomial with rational coefficients standing in for an
/// arbitrary function of one variable.
struct Plugin {
  std::string name;
  std::string arg = "z";
  std::vector<Rational> coeffs;  // index = power

  bool is_zero() const { return coeffs.empty(); }
  RatFunc apply(const RatFunc& x) const;
  Plugin derivative() const;
  std::string body() const;
};

/// Parses a one-variable polynomial such as "z^2 - 3*z"; the variable may have any name.
Plugin parse_plugin(const std::string& name, const std::string& text);

/// Resolution environment for expressions.
struct ParseContext {
  NameTable names;
  std::map<std::string, Rational> fixed_params;
  std::map<std::string, Plugin> funcs;
  std::map<std::string, EpsSeries> lets;
  int order = 0;
};

/// Parses an expression possibly containing eps; the result is ungraded.
EpsSeries parse_series(const std::string& text, const ParseContext& ctx);
/// Parses an eps-free expression.
DiffPoly parse_expression(const std::string& text, const ParseContext& ctx);
/// Parses a jet-free, eps-free expression.
RatFunc parse_function(const std::string& text, const ParseContext& ctx);

struct Document {
  enum class Kind { System, Miura };
  Kind kind = Kind::System;
  std::string name;
  NameTable names;
  /// All declared parameters in declaration order; fixed ones carry a value.
  std::vector<std::pair<std::string, std::optional<Rational>>> params;
  int order = 0;
  std::vector<Plugin> funcs;
  /// "current", "rhs", "map" or "potential"; the same kind for every field.
  std::string entry_kind = "current";
  std::vector<EpsSeries> entries;
};

/// Definitions supplied from outside a document: plugins, values for declared
/// parameters and pre-bound `let` names.
struct DocumentBindings {
  std::map<std::string, Plugin> funcs;
  std::map<std::string, Rational> params;
  std::map<std::string, RatFunc> lets;
};

Document parse_document(const std::string& text);
Document parse_document(const std::string& text, const DocumentBindings& bindings);
std::string print_document(const Document& doc);

EvolutionarySystem to_system(const Document& doc);
MiuraTransform to_miura(const Document& doc);
Document from_system(const EvolutionarySystem& sys);

/// Context for parsing expressions against an existing system's names.
ParseContext context_for(const EvolutionarySystem& sys);

}  // namespace miura
