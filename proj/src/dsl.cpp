#include "miura/dsl.hpp"

#include <cctype>
#include <set>
#include <sstream>

#include "miura/errors.hpp"

namespace miura {

RatFunc Plugin::apply(const RatFunc& x) const {
  RatFunc r;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) r = r * x + RatFunc(*it);
  return r;
}

Plugin Plugin::derivative() const {
  Plugin d{name + "'", arg, {}};
  for (std::size_t k = 1; k < coeffs.size(); ++k) d.coeffs.push_back(coeffs[k] * static_cast<long>(k));
  return d;
}

std::string Plugin::body() const {
  std::vector<Term> terms;
  for (std::size_t k = 0; k < coeffs.size(); ++k)
    terms.push_back({Monomial::variable(0, static_cast<unsigned>(k)), coeffs[k]});
  std::vector<std::string> names{arg};
  return to_string(Poly::from_terms(std::move(terms)), names);
}

namespace {

enum class Tok { Number, Ident, Op, End };

struct Token {
  Tok kind;
  std::string text;
  int line;
  int col;
};

std::vector<Token> tokenize(const std::string& s, int line, int col) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    char ch = s[i];
    if (ch == '\n') {
      ++line;
      col = 1;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(ch))) {
      ++i;
      ++col;
      continue;
    }
    int start_col = col;
    if (std::isdigit(static_cast<unsigned char>(ch))) {
      std::size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      if (j < s.size() && (s[j] == '.' || s[j] == 'e' || s[j] == 'E'))
        throw ParseError("non-rational literal", line, start_col + static_cast<int>(j - i));
      out.push_back({Tok::Number, s.substr(i, j - i), line, start_col});
      col += static_cast<int>(j - i);
      i = j;
    } else if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      out.push_back({Tok::Ident, s.substr(i, j - i), line, start_col});
      col += static_cast<int>(j - i);
      i = j;
    } else if (std::string("+-*/^(),").find(ch) != std::string::npos) {
      out.push_back({Tok::Op, std::string(1, ch), line, start_col});
      ++i;
      ++col;
    } else if (ch == '.') {
      throw ParseError("non-rational literal", line, col);
    } else {
      throw ParseError(std::string("unexpected character '") + ch + "'", line, col);
    }
  }
  out.push_back({Tok::End, "", line, col});
  return out;
}

class Parser {
 public:
  Parser(const std::string& text, const ParseContext& ctx, int line = 1, int col = 1)
      : ctx_(ctx), layout_(ctx.names.layout()), toks_(tokenize(text, line, col)) {}

  EpsSeries parse_all() {
    EpsSeries v = expr();
    if (peek().kind != Tok::End) fail("unexpected '" + peek().text + "'");
    return v;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_++]; }
  bool accept(const char* op) {
    if (peek().kind == Tok::Op && peek().text == op) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(const char* op) {
    if (!accept(op)) fail(std::string("expected '") + op + "'");
  }
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, peek().line, peek().col); }
  [[noreturn]] void fail_at(const Token& t, const std::string& msg) const { throw ParseError(msg, t.line, t.col); }

  EpsSeries constant(const RatFunc& c) const {
    return EpsSeries::constant(DiffPoly(layout_, c), ctx_.order, std::nullopt);
  }
  EpsSeries constant(const DiffPoly& c) const { return EpsSeries::constant(c, ctx_.order, std::nullopt); }

  static bool eps_free(const EpsSeries& s) {
    for (int k = 1; k <= s.order(); ++k)
      if (!s[k].is_zero()) return false;
    return true;
  }

  RatFunc as_function(const EpsSeries& s, const Token& at, const char* what) const {
    if (!eps_free(s) || !s[0].is_jet_free()) fail_at(at, std::string(what) + " must not depend on eps or jet variables");
    return s[0].jet_free_part();
  }

  long as_integer(const EpsSeries& s, const Token& at) const {
    RatFunc f = as_function(s, at, "exponent");
    if (!f.is_constant()) fail_at(at, "exponent must be a rational constant");
    Rational q = f.constant_value();
    if (q.get_den() != 1 || !q.get_num().fits_slong_p()) fail_at(at, "exponent must be an integer");
    return q.get_num().get_si();
  }

  EpsSeries expr() {
    EpsSeries v = term();
    while (true) {
      if (accept("+")) {
        v += term();
      } else if (accept("-")) {
        v -= term();
      } else {
        return v;
      }
    }
  }

  EpsSeries term() {
    EpsSeries v = unary();
    while (true) {
      if (accept("*")) {
        v = v * unary();
      } else if (peek().kind == Tok::Op && peek().text == "/") {
        Token at = next();
        RatFunc d = as_function(unary(), at, "divisor");
        if (d.is_zero()) fail_at(at, "division by zero");
        v = d.inverse() * v;
      } else {
        return v;
      }
    }
  }

  EpsSeries unary() {
    if (accept("-")) return -unary();
    if (accept("+")) return unary();
    return power();
  }

  EpsSeries power() {
    EpsSeries base = primary();
    if (peek().kind == Tok::Op && peek().text == "^") {
      Token at = next();
      EpsSeries e = exponent();
      long n = as_integer(e, at);
      if (n < 0) {
        RatFunc f = as_function(base, at, "base of a negative power");
        if (f.is_zero()) fail_at(at, "zero to a negative power");
        return constant(f.pow(static_cast<int>(n)));
      }
      EpsSeries r = constant(RatFunc(1));
      for (long k = 0; k < n; ++k) r = r * base;
      return r;
    }
    return base;
  }

  EpsSeries exponent() {
    if (accept("-")) return -exponent();
    return primary();
  }

  std::vector<EpsSeries> call_args() {
    std::vector<EpsSeries> args;
    expect("(");
    if (accept(")")) return args;
    do {
      args.push_back(expr());
    } while (accept(","));
    expect(")");
    return args;
  }

  EpsSeries primary() {
    const Token& t = peek();
    if (t.kind == Tok::Number) {
      next();
      return constant(RatFunc(Rational(Integer(t.text))));
    }
    if (accept("(")) {
      EpsSeries v = expr();
      expect(")");
      return v;
    }
    if (t.kind != Tok::Ident) fail(t.kind == Tok::End ? "unexpected end of expression" : "unexpected '" + t.text + "'");
    Token id = next();
    const std::string& name = id.text;
    if (name == "eps") {
      EpsSeries s(layout_, ctx_.order, std::nullopt);
      if (ctx_.order >= 1) s.set(1, DiffPoly(layout_, RatFunc(1)));
      return s;
    }
    if (name == "D") return jet_call(id);
    if (name == "diff") return diff_call(id);
    for (int i = 0; i < layout_.nfields; ++i)
      if (ctx_.names.fields[static_cast<std::size_t>(i)] == name) return constant(DiffPoly::jet(layout_, i, 0));
    for (int i = 0; i < layout_.nparams; ++i)
      if (ctx_.names.params[static_cast<std::size_t>(i)] == name) return constant(DiffPoly::param(layout_, i));
    if (auto it = ctx_.fixed_params.find(name); it != ctx_.fixed_params.end()) return constant(RatFunc(it->second));
    if (auto it = ctx_.lets.find(name); it != ctx_.lets.end()) return series_truncate(it->second, ctx_.order);
    if (auto it = ctx_.funcs.find(name); it != ctx_.funcs.end()) {
      auto args = call_args();
      if (args.size() != 1) fail_at(id, "function '" + name + "' takes one argument");
      return constant(it->second.apply(as_function(args[0], id, "function argument")));
    }
    fail_at(id, "unknown identifier '" + name + "'");
  }

  EpsSeries jet_call(const Token& id) {
    expect("(");
    EpsSeries arg = expr();
    expect(",");
    const Token& n = peek();
    if (n.kind != Tok::Number) fail("expected derivative order");
    next();
    expect(")");
    long times = std::stol(n.text);
    if (times > 64) fail_at(id, "derivative order too large");
    for (long k = 0; k < times; ++k) arg = total_x_derivative(arg);
    return arg;
  }

  EpsSeries diff_call(const Token& id) {
    expect("(");
    EpsSeries v = expr();
    while (accept(",")) {
      const Token& var = peek();
      if (var.kind != Tok::Ident) fail("expected variable name");
      next();
      int index = -1;
      for (int i = 0; i < layout_.nfields; ++i)
        if (ctx_.names.fields[static_cast<std::size_t>(i)] == var.text) index = layout_.field_var(i);
      for (int i = 0; i < layout_.nparams; ++i)
        if (ctx_.names.params[static_cast<std::size_t>(i)] == var.text) index = i;
      if (index < 0) fail_at(var, "cannot differentiate with respect to '" + var.text + "'");
      auto var_index = static_cast<std::size_t>(index);
      v = v.map([&](const DiffPoly& c) { return c.map_coefficients([&](const RatFunc& f) { return f.derivative(var_index); }); },
                std::nullopt);
    }
    expect(")");
    (void)id;
    return v;
  }

  const ParseContext& ctx_;
  Layout layout_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

bool eps_free_series(const EpsSeries& s) {
  for (int k = 1; k <= s.order(); ++k)
    if (!s[k].is_zero()) return false;
  return true;
}

}  // namespace

EpsSeries parse_series(const std::string& text, const ParseContext& ctx) { return Parser(text, ctx).parse_all(); }

DiffPoly parse_expression(const std::string& text, const ParseContext& ctx) {
  EpsSeries s = parse_series(text, ctx);
  if (!eps_free_series(s)) throw ParseError("expression must not contain eps", 1, 1);
  return s[0];
}

RatFunc parse_function(const std::string& text, const ParseContext& ctx) {
  DiffPoly p = parse_expression(text, ctx);
  if (!p.is_jet_free()) throw ParseError("expression must not contain jet variables", 1, 1);
  return p.jet_free_part();
}

Plugin parse_plugin(const std::string& name, const std::string& text) {
  std::set<std::string> idents;
  for (const auto& t : tokenize(text, 1, 1))
    if (t.kind == Tok::Ident) idents.insert(t.text);
  if (idents.size() > 1) throw ParseError("function '" + name + "' must use a single variable", 1, 1);
  Plugin p{name, idents.empty() ? "z" : *idents.begin(), {}};
  ParseContext ctx;
  ctx.names.fields = {p.arg};
  RatFunc f = parse_function(text, ctx);
  if (!f.is_polynomial()) throw ParseError("function '" + name + "' must be a polynomial", 1, 1);
  for (const auto& t : f.num().terms()) {
    unsigned e = t.mono.exp[0];
    if (p.coeffs.size() <= e) p.coeffs.resize(e + 1);
    p.coeffs[e] = t.coef;
  }
  return p;
}

namespace {

struct Statement {
  std::string keyword;
  std::string rest;
  int line;
  int col;  // column where `rest` starts
};

std::vector<Statement> split_statements(const std::string& text) {
  std::vector<Statement> out;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw.substr(0, raw.find('#'));
    if (s.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (std::isspace(static_cast<unsigned char>(s[0]))) {
      if (out.empty()) throw ParseError("continuation line without a statement", line, 1);
      out.back().rest += "\n" + s;
      continue;
    }
    std::size_t sp = s.find_first_of(" \t");
    Statement st{s.substr(0, sp), "", line, 1};
    if (sp != std::string::npos) {
      std::size_t b = s.find_first_not_of(" \t", sp);
      if (b != std::string::npos) {
        st.rest = s.substr(b);
        st.col = static_cast<int>(b) + 1;
      }
    }
    while (!st.rest.empty() && std::isspace(static_cast<unsigned char>(st.rest.back()))) st.rest.pop_back();
    out.push_back(std::move(st));
  }
  return out;
}

std::vector<std::string> words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

bool is_identifier(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char ch : s)
    if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_')) return false;
  return true;
}

/// Splits "lhs = rhs"; returns the offset of rhs within `rest`.
std::pair<std::string, std::size_t> split_assignment(const Statement& st) {
  std::size_t eq = st.rest.find('=');
  if (eq == std::string::npos) throw ParseError("expected '='", st.line, st.col);
  std::string lhs = st.rest.substr(0, eq);
  while (!lhs.empty() && std::isspace(static_cast<unsigned char>(lhs.back()))) lhs.pop_back();
  return {lhs, eq + 1};
}

Rational parse_rational_value(const std::string& text, int line, int col) {
  ParseContext ctx;
  RatFunc f;
  try {
    f = parse_function(text, ctx);
  } catch (const ParseError& e) {
    throw ParseError("invalid parameter value: " + std::string(e.what()), line, col);
  }
  if (!f.is_constant()) throw ParseError("parameter value must be a rational number", line, col);
  return f.constant_value();
}

}  // namespace

Document parse_document(const std::string& text) { return parse_document(text, DocumentBindings{}); }

Document parse_document(const std::string& text, const DocumentBindings& bindings) {
  Document doc;
  std::vector<Statement> body;
  bool have_header = false, have_vars = false;
  for (auto& st : split_statements(text)) {
    const std::string& kw = st.keyword;
    if (kw == "system" || kw == "miura") {
      if (have_header) throw ParseError("duplicate header", st.line, 1);
      have_header = true;
      doc.kind = kw == "system" ? Document::Kind::System : Document::Kind::Miura;
      doc.entry_kind = kw == "system" ? "current" : "map";
      doc.name = st.rest;
    } else if (kw == "vars") {
      doc.names.fields = words(st.rest);
      for (const auto& w : doc.names.fields)
        if (!is_identifier(w)) throw ParseError("invalid variable name '" + w + "'", st.line, st.col);
      have_vars = true;
    } else if (kw == "param") {
      std::size_t eq = st.rest.find('=');
      std::string name = st.rest.substr(0, eq);
      while (!name.empty() && std::isspace(static_cast<unsigned char>(name.back()))) name.pop_back();
      if (!is_identifier(name)) throw ParseError("invalid parameter name '" + name + "'", st.line, st.col);
      std::optional<Rational> value;
      if (eq != std::string::npos)
        value = parse_rational_value(st.rest.substr(eq + 1), st.line, st.col + static_cast<int>(eq) + 1);
      doc.params.emplace_back(name, value);
    } else if (kw == "eps_order") {
      try {
        doc.order = std::stoi(st.rest);
      } catch (const std::exception&) {
        throw ParseError("eps_order expects a non-negative integer", st.line, st.col);
      }
      if (doc.order < 0) throw ParseError("eps_order expects a non-negative integer", st.line, st.col);
    } else if (kw == "func" || kw == "let" || kw == "current" || kw == "rhs" || kw == "map" || kw == "potential") {
      body.push_back(std::move(st));
    } else {
      throw ParseError("unknown statement '" + kw + "'", st.line, 1);
    }
  }
  if (!have_vars) throw ParseError("missing 'vars' declaration", 1, 1);
  for (auto& [name, value] : doc.params)
    if (auto it = bindings.params.find(name); it != bindings.params.end()) value = it->second;
  for (const auto& [name, value] : doc.params)
    if (!value) doc.names.params.push_back(name);
  if (doc.names.layout().nvars() > static_cast<int>(kMaxVars))
    throw ParseError("too many variables and symbolic parameters", 1, 1);

  ParseContext ctx;
  ctx.names = doc.names;
  ctx.order = doc.order;
  for (const auto& [name, value] : doc.params)
    if (value) ctx.fixed_params[name] = *value;
  for (const auto& [name, p] : bindings.funcs) {
    ctx.funcs[name] = p;
    doc.funcs.push_back(p);
  }

  Layout L = doc.names.layout();
  for (const auto& [name, f] : bindings.lets) ctx.lets[name] = EpsSeries::constant(DiffPoly(L, f), doc.order, std::nullopt);
  std::vector<std::optional<EpsSeries>> entries(doc.names.fields.size());
  std::string entry_kind;
  for (const auto& st : body) {
    auto [lhs, off] = split_assignment(st);
    std::string rhs_text = st.rest.substr(off);
    int col = st.col + static_cast<int>(off);
    if (st.keyword == "func") {
      std::size_t lp = lhs.find('('), rp = lhs.find(')');
      if (lp == std::string::npos || rp == std::string::npos || rp < lp)
        throw ParseError("expected func NAME(ARG) = polynomial", st.line, st.col);
      std::string fname = lhs.substr(0, lp);
      std::string arg = lhs.substr(lp + 1, rp - lp - 1);
      Plugin p = parse_plugin(fname, rhs_text);
      if (!p.coeffs.empty() && p.coeffs.size() > 1 && p.arg != arg)
        throw ParseError("func body must use its argument '" + arg + "'", st.line, col);
      p.arg = arg;
      ctx.funcs[fname] = p;
      doc.funcs.push_back(p);
      continue;
    }
    EpsSeries value = Parser(rhs_text, ctx, st.line, col).parse_all();
    if (st.keyword == "let") {
      if (!is_identifier(lhs)) throw ParseError("invalid name '" + lhs + "'", st.line, st.col);
      ctx.lets[lhs] = value;
      continue;
    }
    if (!entry_kind.empty() && entry_kind != st.keyword)
      throw ParseError("cannot mix '" + entry_kind + "' and '" + st.keyword + "' entries", st.line, 1);
    entry_kind = st.keyword;
    bool system_entry = st.keyword == "current" || st.keyword == "rhs";
    if (system_entry != (doc.kind == Document::Kind::System))
      throw ParseError("'" + st.keyword + "' is not allowed in this document", st.line, 1);
    int field = -1;
    for (std::size_t i = 0; i < doc.names.fields.size(); ++i)
      if (doc.names.fields[i] == lhs) field = static_cast<int>(i);
    if (field < 0) throw ParseError("unknown field '" + lhs + "'", st.line, st.col);
    if (entries[static_cast<std::size_t>(field)]) throw ParseError("duplicate entry for '" + lhs + "'", st.line, st.col);
    entries[static_cast<std::size_t>(field)] = value;
  }
  if (!entry_kind.empty()) doc.entry_kind = entry_kind;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (!entries[i]) {
      if (doc.entry_kind == "map") {
        EpsSeries id(L, doc.order, std::nullopt);
        id.set(0, DiffPoly::jet(L, static_cast<int>(i), 0));
        entries[i] = id;
      } else {
        entries[i] = EpsSeries(L, doc.order, std::nullopt);
      }
    }
    doc.entries.push_back(*entries[i]);
  }
  return doc;
}

std::string print_document(const Document& doc) {
  std::ostringstream os;
  os << (doc.kind == Document::Kind::System ? "system" : "miura");
  if (!doc.name.empty()) os << " " << doc.name;
  os << "\nvars";
  for (const auto& f : doc.names.fields) os << " " << f;
  os << "\n";
  for (const auto& [name, value] : doc.params) {
    os << "param " << name;
    if (value) os << " = " << to_string(*value);
    os << "\n";
  }
  os << "eps_order " << doc.order << "\n";
  for (const auto& f : doc.funcs) os << "func " << f.name << "(" << f.arg << ") = " << f.body() << "\n";
  for (std::size_t i = 0; i < doc.entries.size(); ++i)
    os << doc.entry_kind << " " << doc.names.fields[i] << " = " << to_string(doc.entries[i], doc.names) << "\n";
  return os.str();
}

namespace {

std::vector<std::pair<std::string, Rational>> fixed_of(const Document& doc) {
  std::vector<std::pair<std::string, Rational>> out;
  for (const auto& [name, value] : doc.params)
    if (value) out.emplace_back(name, *value);
  return out;
}

}  // namespace

EvolutionarySystem to_system(const Document& doc) {
  if (doc.kind != Document::Kind::System) throw FormError("document does not describe a system");
  EvolutionarySystem sys = doc.entry_kind == "rhs" ? EvolutionarySystem::from_rhs(doc.name, doc.names, doc.entries)
                                                   : EvolutionarySystem::from_currents(doc.name, doc.names, doc.entries);
  sys.fixed_params = fixed_of(doc);
  return sys;
}

MiuraTransform to_miura(const Document& doc) {
  if (doc.kind != Document::Kind::Miura) throw FormError("document does not describe a Miura transformation");
  Layout L = doc.names.layout();
  if (doc.entry_kind == "potential") return MiuraTransform::from_potentials(doc.entries, doc.order);
  std::size_t n = doc.entries.size();
  RationalMatrix lead(n, std::vector<Rational>(n));
  std::vector<Rational> shift(n);
  std::vector<EpsSeries> tails;
  for (std::size_t i = 0; i < n; ++i) {
    const DiffPoly& c0 = doc.entries[i][0];
    if (!c0.is_jet_free()) throw FormError("leading part of a Miura map must be jet-free");
    RatFunc f = c0.jet_free_part();
    if (!f.is_polynomial() || f.num().total_degree() > 1)
      throw FormError("leading part of a Miura map must be an affine function of the fields");
    for (const auto& t : f.num().terms()) {
      if (t.mono.is_one()) {
        shift[i] = t.coef;
        continue;
      }
      int var = -1;
      for (int v = 0; v < L.nvars(); ++v)
        if (t.mono.exp[static_cast<std::size_t>(v)]) var = v;
      if (var < L.nparams) throw FormError("leading part of a Miura map must not depend on parameters");
      lead[i][static_cast<std::size_t>(var - L.nparams)] = t.coef;
    }
    EpsSeries tail = doc.entries[i];
    tail.set(0, DiffPoly(L));
    tails.push_back(std::move(tail));
  }
  return MiuraTransform::general(L, doc.order, lead, shift, tails);
}

Document from_system(const EvolutionarySystem& sys) {
  Document doc;
  doc.kind = Document::Kind::System;
  doc.name = sys.name;
  doc.names = sys.names;
  for (const auto& [name, value] : sys.fixed_params) doc.params.emplace_back(name, value);
  for (const auto& p : sys.names.params) doc.params.emplace_back(p, std::nullopt);
  doc.order = sys.order;
  doc.entry_kind = sys.currents ? "current" : "rhs";
  doc.entries = sys.currents ? *sys.currents : sys.rhs;
  return doc;
}

ParseContext context_for(const EvolutionarySystem& sys) {
  ParseContext ctx;
  ctx.names = sys.names;
  ctx.order = sys.order;
  for (const auto& [name, value] : sys.fixed_params) ctx.fixed_params[name] = value;
  return ctx;
}

}  // namespace miura
