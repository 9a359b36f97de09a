#ifndef FVKIT_PARSER_HPP
#define FVKIT_PARSER_HPP

// Text formats for formulas, signatures, structures and families, and their
// canonical serializations.
//
//   formula     ::= "forall" var "." formula | "exists" var "." formula | implication
//   implication ::= disjunction ["->" implication]
//   disjunction ::= conjunction {"|" conjunction}
//   conjunction ::= negation {"&" negation}
//   negation    ::= "!" negation | quantified formula | atom
//   atom        ::= rel "(" termlist ")" | term "=" term | "(" formula ")"
//
// A quantifier reached from inside a connective extends as far right as
// possible, exactly as at the top level.

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "fvkit/error.hpp"
#include "fvkit/lexer.hpp"
#include "fvkit/logic.hpp"

namespace fvkit {

namespace detail {

inline const std::vector<std::string>& formula_symbols() {
  static const std::vector<std::string> s{"->", "(", ")", ",", ".", "=", "!", "&", "|"};
  return s;
}

class FormulaParser {
public:
  FormulaParser(std::string_view text, const Signature* sig)
      : ts_(tokenize(text, formula_symbols())), sig_(sig) {}

  FormulaPtr parse() {
    auto f = formula();
    if (!ts_.at_end()) ts_.fail("unexpected trailing input");
    return f;
  }

private:
  FormulaPtr formula() {
    if (ts_.is_keyword("forall") || ts_.is_keyword("exists")) return quantified();
    return implication();
  }

  FormulaPtr quantified() {
    bool is_exists = ts_.next().text == "exists";
    const Token& vt = ts_.peek();
    std::string var = ts_.expect_ident("bound variable");
    if (var == "forall" || var == "exists") throw ParseError("keyword used as variable", vt.line, vt.column);
    ts_.expect_symbol(".");
    bound_.push_back(var);
    auto body = formula();
    bound_.pop_back();
    return is_exists ? exists(var, body) : forall(var, body);
  }

  FormulaPtr implication() {
    auto lhs = disjunction();
    if (ts_.accept_symbol("->")) return implies(lhs, implication());
    return lhs;
  }

  FormulaPtr disjunction() {
    auto f = conjunction();
    while (ts_.accept_symbol("|")) f = disj(f, conjunction());
    return f;
  }

  FormulaPtr conjunction() {
    auto f = negation();
    while (ts_.accept_symbol("&")) f = conj(f, negation());
    return f;
  }

  FormulaPtr negation() {
    if (ts_.accept_symbol("!")) return negate(negation());
    if (ts_.is_keyword("forall") || ts_.is_keyword("exists")) return quantified();
    return atom();
  }

  FormulaPtr atom() {
    if (ts_.accept_symbol("(")) {
      auto f = formula();
      ts_.expect_symbol(")");
      return f;
    }
    if (ts_.peek().kind != Token::Kind::Ident) ts_.fail("expected formula");
    const Token start = ts_.peek();
    if (ts_.is_symbol("(", 1)) {
      std::string name = ts_.next().text;
      auto args = arguments();
      if (ts_.is_symbol("=")) {
        auto lhs = function_term(name, std::move(args), start);
        ts_.next();
        return equals(lhs, term());
      }
      if (sig_) {
        auto ar = sig_->relation_arity(name);
        if (!ar) throw ParseError("unknown relation symbol '" + name + "'", start.line, start.column);
        if (*ar != args.size())
          throw ParseError("relation '" + name + "' expects " + std::to_string(*ar) + " arguments, got " +
                               std::to_string(args.size()),
                           start.line, start.column);
      }
      return relation(name, std::move(args));
    }
    auto lhs = term();
    if (!ts_.accept_symbol("=")) ts_.fail("expected '=' after term (a term is not a formula)");
    return equals(lhs, term());
  }

  std::vector<TermPtr> arguments() {
    ts_.expect_symbol("(");
    std::vector<TermPtr> args;
    args.push_back(term());
    while (ts_.accept_symbol(",")) args.push_back(term());
    ts_.expect_symbol(")");
    return args;
  }

  TermPtr function_term(const std::string& name, std::vector<TermPtr> args, const Token& at) {
    if (sig_) {
      auto ar = sig_->function_arity(name);
      if (!ar) throw ParseError("unknown function symbol '" + name + "'", at.line, at.column);
      if (*ar != args.size())
        throw ParseError("function '" + name + "' expects " + std::to_string(*ar) + " arguments, got " +
                             std::to_string(args.size()),
                         at.line, at.column);
    }
    return apply(name, std::move(args));
  }

  TermPtr term() {
    const Token start = ts_.peek();
    std::string name = ts_.expect_ident("term");
    if (ts_.is_symbol("(")) return function_term(name, arguments(), start);
    bool is_bound = std::find(bound_.begin(), bound_.end(), name) != bound_.end();
    if (!is_bound && sig_ && sig_->has_constant(name)) return constant(name);
    if (sig_ && sig_->has_symbol(name) && !sig_->has_constant(name))
      throw ParseError("symbol '" + name + "' used as a variable", start.line, start.column);
    return variable(name);
  }

  TokenStream ts_;
  const Signature* sig_;
  std::vector<std::string> bound_;
};

inline TermPtr rename_term(const TermPtr& t, const std::map<std::string, std::string>& ren) {
  switch (t->kind) {
  case Term::Kind::Variable: {
    auto it = ren.find(t->name);
    return it == ren.end() ? t : variable(it->second);
  }
  case Term::Kind::Constant:
    return t;
  case Term::Kind::Apply: {
    std::vector<TermPtr> args;
    for (const auto& a : t->args) args.push_back(rename_term(a, ren));
    return apply(t->name, std::move(args));
  }
  }
  return t;
}

inline FormulaPtr alpha_rename(const FormulaPtr& f, std::map<std::string, std::string> ren,
                               std::set<std::string>& used) {
  using K = Formula::Kind;
  switch (f->kind) {
  case K::Equal:
    return equals(rename_term(f->terms[0], ren), rename_term(f->terms[1], ren));
  case K::Relation: {
    std::vector<TermPtr> args;
    for (const auto& t : f->terms) args.push_back(rename_term(t, ren));
    return relation(f->symbol, std::move(args));
  }
  case K::Not:
    return negate(alpha_rename(f->children[0], ren, used));
  case K::And:
  case K::Or:
  case K::Implies: {
    auto a = alpha_rename(f->children[0], ren, used);
    auto b = alpha_rename(f->children[1], ren, used);
    return f->kind == K::And ? conj(a, b) : f->kind == K::Or ? disj(a, b) : implies(a, b);
  }
  case K::Exists:
  case K::Forall: {
    std::string name = f->symbol;
    if (used.count(name)) {
      for (std::size_t k = 1;; ++k) {
        std::string cand = f->symbol + "_" + std::to_string(k);
        if (!used.count(cand)) {
          name = cand;
          break;
        }
      }
    }
    used.insert(name);
    ren[f->symbol] = name;
    auto body = alpha_rename(f->children[0], ren, used);
    return f->kind == K::Exists ? exists(name, body) : forall(name, body);
  }
  }
  return f;
}

} // namespace detail

/// Gives every quantifier a bound variable that is distinct from all other
/// bound variables and from the free variables. Idempotent.
inline FormulaPtr alpha_normalize(const FormulaPtr& f) {
  std::set<std::string> used(f->free.begin(), f->free.end());
  return detail::alpha_rename(f, {}, used);
}

/// Parses a formula. With a signature, symbols and arities are checked and
/// bare identifiers naming constants become constants; without one, every
/// bare identifier is a variable.
inline FormulaPtr parse_formula(std::string_view text, const Signature* sig = nullptr) {
  return alpha_normalize(detail::FormulaParser(text, sig).parse());
}

inline FormulaPtr parse_formula(std::string_view text, const Signature& sig) {
  return parse_formula(text, &sig);
}

inline std::string serialize_term(const Term& t) {
  if (t.kind != Term::Kind::Apply) return t.name;
  std::string s = t.name + "(";
  for (std::size_t i = 0; i < t.args.size(); ++i) {
    if (i) s += ",";
    s += serialize_term(*t.args[i]);
  }
  return s + ")";
}

namespace detail {

inline void serialize_formula(const Formula& f, bool open, std::string& out) {
  using K = Formula::Kind;
  switch (f.kind) {
  case K::Equal:
    out += serialize_term(*f.terms[0]) + " = " + serialize_term(*f.terms[1]);
    return;
  case K::Relation:
    out += f.symbol + "(";
    for (std::size_t i = 0; i < f.terms.size(); ++i) {
      if (i) out += ",";
      out += serialize_term(*f.terms[i]);
    }
    out += ")";
    return;
  case K::Not:
    out += "!";
    serialize_formula(*f.children[0], false, out);
    return;
  case K::And:
  case K::Or:
  case K::Implies: {
    const char* op = f.kind == K::And ? " & " : f.kind == K::Or ? " | " : " -> ";
    out += "(";
    serialize_formula(*f.children[0], false, out);
    out += op;
    serialize_formula(*f.children[1], false, out);
    out += ")";
    return;
  }
  case K::Exists:
  case K::Forall:
    if (!open) out += "(";
    out += f.kind == K::Exists ? "exists " : "forall ";
    out += f.symbol + ". ";
    serialize_formula(*f.children[0], true, out);
    if (!open) out += ")";
    return;
  }
}

} // namespace detail

/// Canonical text: binary connectives always parenthesized, quantifiers
/// parenthesized unless they stand at the top or directly under a quantifier.
inline std::string serialize_formula(const Formula& f) {
  std::string out;
  detail::serialize_formula(f, true, out);
  return out;
}

// ---------------------------------------------------------------------------
// Signature, structure and family files

inline Signature parse_signature(std::string_view text) {
  detail::TokenStream ts(detail::tokenize(text, {"/"}));
  Signature sig;
  while (!ts.at_end()) {
    const detail::Token at = ts.peek();
    std::string kind = ts.expect_ident("'rel', 'fun' or 'const'");
    std::string name = ts.expect_ident("symbol name");
    try {
      if (kind == "rel" || kind == "fun") {
        ts.expect_symbol("/");
        std::size_t ar = ts.expect_number("arity");
        if (kind == "rel")
          sig.add_relation(name, ar);
        else
          sig.add_function(name, ar);
      } else if (kind == "const") {
        sig.add_constant(name);
      } else {
        throw ParseError("unknown declaration '" + kind + "'", at.line, at.column);
      }
    } catch (const ValidationError& e) {
      throw ParseError(e.what(), at.line, at.column);
    }
  }
  return sig;
}

inline std::string serialize_signature(const Signature& sig) {
  std::ostringstream os;
  for (const auto& [name, ar] : sig.relations()) os << "rel " << name << "/" << ar << "\n";
  for (const auto& [name, ar] : sig.functions()) os << "fun " << name << "/" << ar << "\n";
  for (const auto& name : sig.constants()) os << "const " << name << "\n";
  return os.str();
}

namespace detail {

inline std::vector<Element> parse_tuple(TokenStream& ts) {
  std::vector<Element> t;
  if (ts.accept_symbol("(")) {
    t.push_back(ts.expect_number("element"));
    while (ts.accept_symbol(",")) t.push_back(ts.expect_number("element"));
    ts.expect_symbol(")");
  } else {
    t.push_back(ts.expect_number("element"));
  }
  return t;
}

inline std::string tuple_text(const std::vector<Element>& t, bool bare_unary) {
  if (bare_unary && t.size() == 1) return std::to_string(t[0]);
  std::string s = "(";
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(t[i]);
  }
  return s + ")";
}

inline FiniteStructure parse_structure(TokenStream& ts, const Signature& sig) {
  auto fail_at = [](const Token& t, const std::string& msg) -> ParseError {
    return ParseError(msg, t.line, t.column);
  };
  if (!ts.accept_keyword("size")) ts.fail("expected 'size'");
  const Token size_tok = ts.peek();
  std::size_t n = ts.expect_number("universe size");
  if (n == 0) throw fail_at(size_tok, "universe must be nonempty");
  FiniteStructure s(sig, n);
  std::set<std::string> seen;

  while (ts.accept_symbol(";")) {
    if (ts.at_end()) break;
    const Token at = ts.peek();
    std::string kind = ts.expect_ident("'rel', 'fun' or 'const'");
    std::string name = ts.expect_ident("symbol name");
    if (!seen.insert(name).second) throw fail_at(at, "symbol '" + name + "' interpreted twice");
    ts.expect_symbol("=");
    try {
      if (kind == "rel") {
        auto ar = sig.relation_arity(name);
        if (!ar) throw fail_at(at, "unknown relation symbol '" + name + "'");
        ts.expect_symbol("{");
        if (!ts.is_symbol("}")) {
          do {
            const Token tt = ts.peek();
            auto tup = parse_tuple(ts);
            if (tup.size() != *ar) throw fail_at(tt, "tuple arity mismatch for '" + name + "'");
            s.set_relation(name, tup);
          } while (ts.accept_symbol(","));
        }
        ts.expect_symbol("}");
      } else if (kind == "fun") {
        auto ar = sig.function_arity(name);
        if (!ar) throw fail_at(at, "unknown function symbol '" + name + "'");
        std::set<std::size_t> defined;
        ts.expect_symbol("{");
        if (!ts.is_symbol("}")) {
          do {
            const Token tt = ts.peek();
            auto in = parse_tuple(ts);
            if (in.size() != *ar) throw fail_at(tt, "argument arity mismatch for '" + name + "'");
            ts.expect_symbol("->");
            Element out = ts.expect_number("function value");
            if (!defined.insert(s.encode(in, *ar)).second)
              throw fail_at(tt, "function '" + name + "' defined twice on one input");
            s.set_function(name, in, out);
          } while (ts.accept_symbol(","));
        }
        ts.expect_symbol("}");
        if (defined.size() != s.function_table(name).size())
          throw fail_at(at, "partial function table for '" + name + "'");
      } else if (kind == "const") {
        if (!sig.has_constant(name)) throw fail_at(at, "unknown constant '" + name + "'");
        s.set_constant(name, ts.expect_number("element"));
      } else {
        throw fail_at(at, "unknown declaration '" + kind + "'");
      }
    } catch (const ValidationError& e) {
      throw fail_at(at, e.what());
    }
  }
  for (const auto& [name, ar] : sig.relations())
    if (!seen.count(name)) ts.fail("relation '" + name + "' not interpreted");
  for (const auto& [name, ar] : sig.functions())
    if (!seen.count(name)) ts.fail("function '" + name + "' not interpreted");
  for (const auto& name : sig.constants())
    if (!seen.count(name)) ts.fail("constant '" + name + "' not interpreted");
  return s;
}

inline const std::vector<std::string>& structure_symbols() {
  static const std::vector<std::string> s{"->", ";", "=", "{", "}", "(", ")", ","};
  return s;
}

} // namespace detail

/// Parses "size N; rel R = {...}; fun f = {in->out,...}; const c = k;".
/// Every symbol of `sig` must be interpreted; the final ';' is optional.
inline FiniteStructure parse_structure(std::string_view text, const Signature& sig) {
  detail::TokenStream ts(detail::tokenize(text, detail::structure_symbols()));
  auto s = detail::parse_structure(ts, sig);
  if (!ts.at_end()) ts.fail("unexpected trailing input");
  return s;
}

/// Canonical form; `separator` goes between statements ("\n" for files,
/// " " for one-line family entries).
inline std::string serialize_structure(const FiniteStructure& s, std::string_view separator = "\n") {
  std::string out = "size " + std::to_string(s.size()) + ";";
  const auto& sig = s.signature();
  for (const auto& [name, ar] : sig.relations()) {
    out += separator;
    out += "rel " + name + " = {";
    bool first = true;
    for (const auto& t : s.tuples(name)) {
      if (!first) out += ",";
      first = false;
      out += detail::tuple_text(t, false);
    }
    out += "};";
  }
  for (const auto& [name, ar] : sig.functions()) {
    out += separator;
    out += "fun " + name + " = {";
    const auto& table = s.function_table(name);
    for (std::size_t code = 0; code < table.size(); ++code) {
      if (code) out += ",";
      out += detail::tuple_text(s.decode(code, ar), true) + "->" + std::to_string(table[code]);
    }
    out += "};";
  }
  for (const auto& name : sig.constants()) {
    out += separator;
    out += "const " + name + " = " + std::to_string(s.constant(name)) + ";";
  }
  if (separator == "\n") out += "\n";
  return out;
}

/// Maps a path named in a family file to the text of a structure file.
using StructureResolver = std::function<std::string(const std::string& path)>;

/// Parses lines "LABEL: path-or-inline-structure". An entry starting with
/// "size" is read inline; anything else is handed to `resolver`.
inline Family parse_family(std::string_view text, const Signature& sig, const StructureResolver& resolver = {}) {
  Family fam(sig);
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    ++line_no;
    pos = eol + 1;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) continue;
    line = line.substr(first);
    auto colon = line.find(':');
    if (colon == std::string_view::npos) throw ParseError("expected 'LABEL: structure'", line_no, first + 1);
    std::string label(line.substr(0, colon));
    while (!label.empty() && (label.back() == ' ' || label.back() == '\t')) label.pop_back();
    if (label.empty()) throw ParseError("empty index label", line_no, first + 1);
    std::string_view rest = line.substr(colon + 1);
    auto rs = rest.find_first_not_of(" \t");
    if (rs == std::string_view::npos) throw ParseError("missing structure for '" + label + "'", line_no, first + colon + 2);
    rest = rest.substr(rs);
    while (!rest.empty() && (rest.back() == ' ' || rest.back() == '\t' || rest.back() == '\r'))
      rest.remove_suffix(1);

    std::string body;
    if (rest.substr(0, 4) == "size" && (rest.size() == 4 || !std::isalnum(static_cast<unsigned char>(rest[4])))) {
      body = std::string(rest);
    } else {
      if (!resolver) throw ParseError("no resolver for structure path '" + std::string(rest) + "'", line_no, 1);
      body = resolver(std::string(rest));
    }
    FiniteStructure s = [&] {
      try {
        return parse_structure(body, sig);
      } catch (const ParseError& e) {
        throw ParseError("index '" + label + "': " + e.what(), line_no, 1);
      }
    }();
    try {
      fam.add(label, std::move(s));
    } catch (const ValidationError& e) {
      throw ParseError(e.what(), line_no, 1);
    }
    if (eol == text.size()) break;
  }
  return fam;
}

inline std::string serialize_family(const Family& fam) {
  std::string out;
  for (std::size_t i = 0; i < fam.size(); ++i)
    out += fam.label(i) + ": " + serialize_structure(fam.at(i), " ") + "\n";
  return out;
}

} // namespace fvkit

#endif
