#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "miura/deform.hpp"
#include "miura/dsl.hpp"
#include "miura/errors.hpp"
#include "miura/fmanifold.hpp"
#include "miura/invariants.hpp"

using json = nlohmann::ordered_json;
using namespace miura;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr double kTolerance = 1e-9;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// FNV-1a, 64 bit.
std::string digest(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << "fnv1a64:" << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

class Report {
 public:
  explicit Report(std::string command) : command_(std::move(command)) {}

  void input(const std::string& label, const std::string& bytes) { inputs_[label] = digest(bytes); }

  template <typename Fn>
  void check(const std::string& name, Fn fn) {
    auto t0 = std::chrono::steady_clock::now();
    auto [status, residual] = fn();
    double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    checks_.push_back({{"name", name}, {"status", status}, {"residual", residual}, {"runtime_ms", ms}});
  }
  void check(const std::string& name, bool ok, const std::string& residual) {
    checks_.push_back({{"name", name}, {"status", ok ? "pass" : "fail"}, {"residual", residual}, {"runtime_ms", 0.0}});
  }

  json& result() { return result_; }

  std::string status() const {
    std::string s = "pass";
    for (const auto& c : checks_) {
      if (c["status"] == "fail") return "fail";
      if (c["status"] == "inconclusive") s = "inconclusive";
    }
    return s;
  }

  json to_json() const {
    json j;
    j["tool"] = "miura";
    j["version"] = kVersion;
    j["command"] = command_;
    j["inputs"] = inputs_;
    j["status"] = status();
    j["checks"] = checks_;
    j["result"] = result_;
    return j;
  }

 private:
  std::string command_;
  json inputs_ = json::object();
  json checks_ = json::array();
  json result_ = json::object();
};

struct Options {
  std::string file, out, mode = "exact", point, group, flow, case_name, vars = "u", expr, second;
  std::vector<std::string> positional;
  std::optional<std::string> c;
  std::optional<int> m;
  std::optional<int> order;
  int max_degree = 3;
  std::optional<std::uint64_t> seed;
  std::map<std::string, std::string> plugins;
};

Rational parse_rational(const std::string& s) {
  try {
    Rational q(s);
    q.canonicalize();
    return q;
  } catch (const std::exception&) {
    throw UsageError("not a rational number: '" + s + "'");
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep))
    if (!cur.empty()) out.push_back(cur);
  return out;
}

std::vector<Rational> parse_point(const std::string& s) {
  std::vector<Rational> p;
  for (const auto& x : split(s, ',')) p.push_back(parse_rational(x));
  return p;
}

std::pair<int, int> parse_flow(const std::string& s) {
  auto parts = split(s, ',');
  if (parts.size() != 2) throw UsageError("--flow expects p,l");
  try {
    return {std::stoi(parts[0]), std::stoi(parts[1])};
  } catch (const std::exception&) {
    throw UsageError("--flow expects integers p,l");
  }
}

std::optional<Rational> opt_c(const Options& o) {
  if (!o.c) return std::nullopt;
  return parse_rational(*o.c);
}

const std::vector<EpsSeries>& currents(const EvolutionarySystem& s) {
  if (!s.currents) throw FormError("system '" + s.name + "' is not in conservation form");
  return *s.currents;
}

json forms_json(const FormList& forms, const NameTable& names) {
  json j = json::array();
  for (const auto& f : forms) j.push_back(to_string(f, names));
  return j;
}

std::string forms_string(const FormList& forms, const NameTable& names) {
  std::string s;
  for (std::size_t i = 0; i < forms.size(); ++i) {
    if (i) s += "; ";
    s += names.fields[i] + ": " + to_string(forms[i], names);
  }
  return s;
}

EvolutionarySystem load_system(Report& r, const std::string& path, const std::string& label) {
  if (path.empty()) throw UsageError(label + ": a system file is required");
  std::string text = read_file(path);
  r.input(label, text);
  return to_system(parse_document(text));
}

PluginMap plugin_map(const Options& o) {
  PluginMap pm;
  for (const auto& [name, body] : o.plugins)
    if (name == "F1" || name == "F2" || name == "F3") pm[name] = parse_plugin(name, body);
  return pm;
}

DeformationCase load_case(const Options& o) {
  if (o.case_name.empty()) throw UsageError("--case is required");
  return deformation_case(o.case_name, opt_c(o), o.m);
}

std::string print_system(const EvolutionarySystem& sys) { return print_document(from_system(sys)); }

// --- subcommands ----------------------------------------------------------

void cmd_parse(const Options& o, Report& r) {
  if (o.file.empty()) throw UsageError("parse: --file is required");
  std::string text = read_file(o.file);
  r.input("file", text);
  DocumentBindings bindings;
  for (const char* name : {"F1", "F2", "F3"}) {
    auto it = o.plugins.find(name);
    bindings.funcs[name] = it != o.plugins.end() ? parse_plugin(name, it->second) : Plugin{name, "z", {}};
  }
  if (o.c) bindings.params["c"] = parse_rational(*o.c);
  if (o.m) bindings.params["m"] = *o.m;
  Document doc = parse_document(text, bindings);
  std::string printed = print_document(doc);
  std::string again = print_document(parse_document(printed));
  r.check("round-trip", printed == again, printed == again ? "" : again);
  if (doc.kind == Document::Kind::System) {
    to_system(doc);
  } else {
    to_miura(doc);
  }
  r.result()["document"] = printed;
}

void cmd_dx(const Options& o, Report& r) {
  if (o.expr.empty()) throw UsageError("dx: an expression is required");
  ParseContext ctx;
  ctx.names.fields = split(o.vars, ',');
  DiffPoly f = parse_expression(o.expr, ctx);
  int times = o.order.value_or(1);
  if (times < 0) throw UsageError("--order must be non-negative");
  r.result()["expression"] = to_string(f, ctx.names);
  r.result()["derivative"] = to_string(total_x_derivative(f, times), ctx.names);
}

void cmd_bracket(const Options& o, Report& r) {
  EvolutionarySystem a = load_system(r, o.file, "file");
  EvolutionarySystem b = load_system(r, o.second, "second");
  FormList br = bracket_flat(currents(a), currents(b));
  r.result()["bracket"] = forms_json(br, a.names);
  r.check("bracket vanishes", all_zero(br), all_zero(br) ? "" : forms_string(br, a.names));
}

void cmd_commute(const Options& o, Report& r) {
  EvolutionarySystem a = load_system(r, o.file, "file");
  EvolutionarySystem b = load_system(r, o.second, "second");
  FormList cm = commutator_direct(a, b);
  r.result()["commutator"] = forms_json(cm, a.names);
  r.check("flows commute", all_zero(cm), all_zero(cm) ? "" : forms_string(cm, a.names));
}

// The invariant series of a and b agree (exactly or at `point`).
void compare_invariants(Report& r, const EvolutionarySystem& a, const EvolutionarySystem& b, const Options& o) {
  if (o.mode == "numeric") {
    std::vector<Rational> p = parse_point(o.point);
    InvariantSeries x = miura_invariant_series(a, Mode::Numeric, p);
    InvariantSeries y = miura_invariant_series(b, Mode::Numeric, p);
    double worst = 0;
    for (std::size_t i = 0; i < x.numeric.size(); ++i)
      for (std::size_t k = 0; k < x.numeric[i].size(); ++k) {
        double scale = std::max(1.0, std::abs(x.numeric[i][k]));
        worst = std::max(worst, std::abs(x.numeric[i][k] - y.numeric[i][k]) / scale);
      }
    std::ostringstream os;
    os << std::setprecision(3) << worst;
    r.check("invariants preserved", worst <= kTolerance, os.str());
    return;
  }
  InvariantSeries x = miura_invariant_series(a, Mode::Exact);
  InvariantSeries y = miura_invariant_series(b, Mode::Exact);
  std::string diff;
  for (std::size_t i = 0; i < x.exact.size(); ++i)
    for (std::size_t k = 0; k < x.exact[i].size(); ++k) {
      RatFunc d = x.exact[i][k] - y.exact[i][k];
      if (!d.is_zero()) diff += "lambda" + std::to_string(i + 1) + "[" + std::to_string(k) + "]: " +
                                to_string(d, a.names.coefficient_names()) + "; ";
    }
  r.check("invariants preserved", diff.empty(), diff);
}

void cmd_miura_apply(const Options& o, Report& r) {
  EvolutionarySystem sys = load_system(r, o.file, "file");
  MiuraTransform m;
  if (!o.second.empty()) {
    std::string text = read_file(o.second);
    r.input("miura", text);
    m = to_miura(parse_document(text));
  } else if (o.seed) {
    m = random_miura(sys.layout(), o.order.value_or(sys.order), 3, *o.seed);
    r.result()["seed"] = *o.seed;
  } else {
    throw UsageError("miura-apply: give a Miura file or --seed");
  }
  EvolutionarySystem t = apply_miura(sys, m);
  r.result()["document"] = print_system(t);
  if (o.seed || o.mode == "numeric") compare_invariants(r, sys, t, o);
}

void cmd_miura_invert(const Options& o, Report& r) {
  if (o.file.empty()) throw UsageError("miura-invert: --file is required");
  std::string text = read_file(o.file);
  r.input("file", text);
  Document doc = parse_document(text);
  MiuraTransform m = to_miura(doc);
  MiuraTransform inv = invert_miura(m);
  Document out;
  out.kind = Document::Kind::Miura;
  out.name = doc.name + "_inverse";
  out.names = doc.names;
  out.params = doc.params;
  out.order = doc.order;
  out.entry_kind = "map";
  out.entries = inv.forward();
  r.result()["document"] = print_document(out);
  MiuraTransform id = compose(m, inv);
  std::string residual;
  for (std::size_t i = 0; i < id.tails.size(); ++i)
    if (!id.tails[i].is_zero()) residual += doc.names.fields[i] + ": " + to_string(id.tails[i], doc.names) + "; ";
  r.check("composition is the identity", residual.empty(), residual);
}

void cmd_invariants(const Options& o, Report& r) {
  EvolutionarySystem sys = load_system(r, o.file, "file");
  json out = json::array();
  if (o.mode == "numeric") {
    std::vector<Rational> p = parse_point(o.point);
    InvariantSeries inv = miura_invariant_series(sys, Mode::Numeric, p);
    for (const auto& lam : inv.numeric) out.push_back(lam);
    std::ostringstream os;
    os << std::setprecision(3) << inv.max_relative_residual;
    r.check("characteristic residual", inv.max_relative_residual <= kTolerance, os.str());
    r.result()["point"] = inv.point;
  } else if (o.mode == "exact") {
    InvariantSeries inv = miura_invariant_series(sys, Mode::Exact);
    auto names = sys.names.coefficient_names();
    for (const auto& lam : inv.exact) {
      json terms = json::array();
      for (const auto& t : lam) terms.push_back(to_string(t, names));
      out.push_back(terms);
    }
    std::string residual;
    auto res = invariant_residual(sys, inv);
    for (std::size_t i = 0; i < res.size(); ++i)
      for (std::size_t k = 0; k < res[i].size(); ++k)
        if (!res[i][k].is_zero()) residual += to_string(res[i][k], names) + "; ";
    r.check("characteristic residual", residual.empty(), residual);
  } else {
    throw UsageError("--mode must be exact or numeric");
  }
  r.result()["mode"] = o.mode;
  r.result()["lambda"] = out;
}

void cmd_dispersion(const Options& o, Report& r) {
  EvolutionarySystem sys = load_system(r, o.file, "file");
  std::vector<Rational> u0 = parse_point(o.point);
  if (static_cast<int>(u0.size()) != sys.nfields()) throw UsageError("--point needs one value per field");
  json out = json::array();
  if (o.mode == "numeric") {
    // omega(k) = -k lambda(u0, ik): the k^(n+1) coefficient is -i^n lambda_n.
    InvariantSeries inv = miura_invariant_series(sys, Mode::Numeric, u0);
    for (const auto& lam : inv.numeric) {
      json coeffs = json::array({json::array({0.0, 0.0})});
      for (std::size_t n = 0; n < lam.size(); ++n) {
        double re = n % 4 == 0 ? -lam[n] : n % 4 == 2 ? lam[n] : 0.0;
        double im = n % 4 == 1 ? -lam[n] : n % 4 == 3 ? lam[n] : 0.0;
        coeffs.push_back(json::array({re, im}));
      }
      out.push_back(coeffs);
    }
    r.result()["coefficients"] = "[re, im] of k^0, k^1, ...";
  } else {
    for (const auto& w : dispersion_relations(sys, u0, o.order.value_or(sys.order + 1))) out.push_back(to_string(w));
  }
  r.result()["omega"] = out;
}

VectorPotential potential_from(const Options& o) {
  if (o.group.empty()) throw UsageError("--group is required");
  return catalog_potential(o.group, opt_c(o), o.m.value_or(0));
}

void cmd_hierarchy(const Options& o, Report& r) {
  VectorPotential v = potential_from(o);
  auto [p, l] = parse_flow(o.flow.empty() ? "1,0" : o.flow);
  EvolutionarySystem f = hierarchy_flow(v, p, l);
  r.result()["flow"] = {p, l};
  r.result()["currents"] = forms_json(currents(f), f.names);
  r.result()["document"] = print_system(f);
}

void cmd_catalog(const Options& o, Report& r) {
  VectorPotential v = potential_from(o);
  auto names = v.names.coefficient_names();
  json comps = json::array();
  for (const auto& a : v.components) comps.push_back(to_string(a, names));
  r.result()["name"] = v.name;
  r.result()["fields"] = v.names.fields;
  r.result()["potential"] = comps;
  auto residuals = [&](const CheckResult& c) {
    std::string s;
    for (const auto& [label, res] : c.residuals) s += label + ": " + to_string(res, names) + "; ";
    return s;
  };
  CheckResult unity = check_unity(v);
  r.check("unity", unity.ok, residuals(unity));
  CheckResult assoc = check_oriented_associativity(v);
  r.check("oriented associativity", assoc.ok, residuals(assoc));
  if (v.names.params.empty()) {
    std::size_t n = static_cast<std::size_t>(v.dimension());
    RationalMatrix eta(n, std::vector<Rational>(n));
    for (std::size_t i = 0; i < n; ++i) eta[i][n - 1 - i] = 1;
    r.result()["frobenius"] = check_frobenius(v, eta).ok();
  }
}

void cmd_deform(const Options& o, Report& r) {
  DeformationCase dc = load_case(o);
  EvolutionarySystem sys = build_deformation(dc, plugin_map(o));
  r.result()["case"] = dc.name;
  r.result()["c"] = to_string(dc.c);
  if (dc.group == "I2") r.result()["m"] = dc.m;
  r.result()["document"] = print_system(sys);
}

void cmd_symmetry(const Options& o, Report& r) {
  DeformationCase dc = load_case(o);
  PluginMap pm = plugin_map(o);
  bool has_data = o.plugins.contains("Fh") || o.plugins.contains("Ff") || o.plugins.contains("Fg");
  if (!has_data) {
    json docs = json::array();
    for (const auto& s : case_symmetries(dc, pm)) docs.push_back(print_system(s));
    r.result()["symmetries"] = docs;
    return;
  }
  ParseContext ctx;
  ctx.names.fields = {"u", "v"};
  SymmetryData data;
  if (o.plugins.contains("Fh")) data.h = parse_function(o.plugins.at("Fh"), ctx);
  if (o.plugins.contains("Ff")) data.f = parse_function(o.plugins.at("Ff"), ctx);
  if (o.plugins.contains("Fg")) data.g = parse_function(o.plugins.at("Fg"), ctx);
  RatFunc res = symmetry_equation_residual(dc, data);
  r.check("defining equation", res.is_zero(), res.is_zero() ? "" : to_string(res, ctx.names.coefficient_names()));
  if (!res.is_zero()) return;
  EvolutionarySystem sym = build_symmetry(dc, data, pm);
  r.result()["document"] = print_system(sym);
  EvolutionarySystem sys = build_deformation(dc, pm);
  FormList br = bracket_flat(currents(sys), currents(sym));
  r.check("commutes with the deformation", all_zero(br), all_zero(br) ? "" : forms_string(br, sys.names));
}

void cmd_trivialize(const Options& o, Report& r) {
  EvolutionarySystem sys = o.file.empty() ? build_deformation(load_case(o), plugin_map(o)) : load_system(r, o.file, "file");
  TrivialitySystem tps = triviality_system(sys);
  TrivialityResult res = solve_triviality(tps, o.max_degree);
  auto names = tps.names.coefficient_names();
  r.result()["status"] = to_string(res.status);
  if (res.status == TrivialityResult::Status::Trivialized) {
    json m = json::array();
    for (const auto& x : res.M) m.push_back(to_string(x, names));
    r.result()["M"] = m;
    std::string residual;
    for (const auto& x : triviality_residuals(tps, res.M))
      if (!x.is_zero()) residual += to_string(x, names) + "; ";
    r.check("resubstitution", residual.empty(), residual);
  } else if (res.status == TrivialityResult::Status::Obstructed) {
    json lam = json::array();
    for (const auto& x : res.multipliers) lam.push_back(to_string(x, names));
    json labels = json::array();
    for (const auto& c : tps.constraints) labels.push_back(c.label);
    r.result()["constraints"] = labels;
    r.result()["multipliers"] = lam;
    r.result()["obstruction"] = to_string(res.obstruction, names);
    r.check("certificate", !res.obstruction.is_zero(), to_string(res.obstruction, names));
  } else {
    r.check("decided", [] { return std::pair<std::string, std::string>{"inconclusive", "no certificate up to --max-degree"}; });
  }
}

EvolutionarySystem truncated(const EvolutionarySystem& s, int order) {
  if (order >= s.order) return s;
  std::vector<EpsSeries> cur;
  for (const auto& c : currents(s)) cur.push_back(series_truncate(c, order));
  EvolutionarySystem t = EvolutionarySystem::from_currents(s.name, s.names, cur);
  t.fixed_params = s.fixed_params;
  return t;
}

void cmd_verify(const Options& o, Report& r) {
  DeformationCase dc = load_case(o);
  PluginMap pm = plugin_map(o);
  EvolutionarySystem sys = build_deformation(dc, pm);
  int order = o.order.value_or(sys.order);
  if (order < 0 || order > sys.order) throw UsageError("--order must lie in [0, " + std::to_string(sys.order) + "]");
  std::vector<EvolutionarySystem> syms;
  for (const auto& s : case_symmetries(dc, pm)) syms.push_back(truncated(s, order));
  IntegrabilityReport rep = verify_integrability(truncated(sys, order), syms);
  for (const auto& c : rep.checks) r.check(c.label, c.ok, c.residual);
  r.result()["case"] = dc.name;
  r.result()["order"] = rep.order;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"miura: exact computations with deformed systems of conservation laws"};
  app.require_subcommand(1);
  Options o;
  std::string order_text, seed_text, max_degree_text;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--file", o.file, "input document");
    sub->add_option("--out", o.out, "write the report here instead of stdout");
    sub->add_option("--order", o.order, "eps order (derivatives for dx, k-order for dispersion)");
    sub->add_option("--mode", o.mode, "exact or numeric")->check(CLI::IsMember({"exact", "numeric"}));
    sub->add_option("--point", o.point, "comma separated rational values of the fields");
    sub->add_option("--c", o.c, "parameter c (rational)");
    sub->add_option("--m", o.m, "I2 exponent");
    sub->add_option("--group", o.group, "B2, B3, B4 or I2");
    sub->add_option("--flow", o.flow, "p,l");
    sub->add_option("--case", o.case_name, "deformation case");
    for (const char* p : {"F1", "F2", "F3", "Ff", "Fg", "Fh"})
      sub->add_option_function<std::string>(std::string("--") + p, [&o, p](const std::string& v) { o.plugins[p] = v; },
                                            "plugin or symmetry datum");
    sub->add_option("--max-degree", o.max_degree, "degree bound for triviality ansatz");
    sub->add_option("--seed", o.seed, "seed for randomized transforms");
    sub->add_option("--vars", o.vars, "comma separated field names (dx)");
  };

  struct Entry {
    const char* name;
    const char* help;
    void (*run)(const Options&, Report&);
  };
  const Entry entries[] = {
      {"parse", "parse and canonically print a document", cmd_parse},
      {"dx", "total x-derivative of an expression", cmd_dx},
      {"bracket", "bracket of two systems in conservation form", cmd_bracket},
      {"commute", "direct commutator of two flows", cmd_commute},
      {"miura-apply", "apply a Miura transform (file or --seed)", cmd_miura_apply},
      {"miura-invert", "invert a Miura transform", cmd_miura_invert},
      {"invariants", "Miura invariant series", cmd_invariants},
      {"dispersion", "linear dispersion relations", cmd_dispersion},
      {"hierarchy", "principal hierarchy flow", cmd_hierarchy},
      {"catalog", "catalog vector potential and its checks", cmd_catalog},
      {"deform", "deformation from the tables", cmd_deform},
      {"symmetry", "symmetries of a deformation", cmd_symmetry},
      {"trivialize", "triviality of the first-order part", cmd_trivialize},
      {"verify", "integrability of a deformation", cmd_verify},
  };
  std::map<CLI::App*, const Entry*> by_sub;
  for (const auto& e : entries) {
    CLI::App* sub = app.add_subcommand(e.name, e.help);
    common(sub);
    if (std::string(e.name) == "dx") sub->add_option("expr", o.expr, "expression");
    if (std::string(e.name) == "bracket" || std::string(e.name) == "commute" || std::string(e.name) == "miura-apply")
      sub->add_option("inputs", o.positional, "first and second document")->expected(0, 2);
    by_sub[sub] = &e;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  if (!o.positional.empty() && o.file.empty()) {
    o.file = o.positional.front();
    o.positional.erase(o.positional.begin());
  }
  if (!o.positional.empty()) o.second = o.positional.front();

  const Entry* entry = nullptr;
  for (const auto& [sub, e] : by_sub)
    if (sub->parsed()) entry = e;
  Report report(entry->name);
  int code = 0;
  try {
    entry->run(o, report);
    code = report.status() == "pass" ? 0 : 1;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    report.check("computation", false, e.what());
    code = 1;
  }
  std::string text = report.to_json().dump(2) + "\n";
  if (o.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(o.out);
    if (!out) {
      std::cerr << "cannot write " << o.out << "\n";
      return 2;
    }
    out << text;
  }
  return code;
}
