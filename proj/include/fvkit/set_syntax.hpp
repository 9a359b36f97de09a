#ifndef FVKIT_SET_SYNTAX_HPP
#define FVKIT_SET_SYNTAX_HPP

// Text form of set formulas.
//
//   formula ::= "setexists" z "." formula | "setforall" z "." formula | disj
//   disj    ::= conj {"||" conj}
//   conj    ::= neg {"&&" neg}
//   neg     ::= "!!" neg | quantified formula | atom
//   atom    ::= "C[" j "]" "(" term ")" | term "==" term | "true" | "false" | "(" formula ")"
//   term    ::= sum {("(+)" | "|") sum}      -- ring sum / join, left to right
//   sum     ::= unary {("(.)" | "&") unary}  -- ring product / meet
//   unary   ::= "~" unary | "0" | "1" | var | "(" term ")"
//
// Serialization parenthesizes every n-ary node, so mixed operators never rely
// on precedence.

#include <string>
#include <string_view>

#include "fvkit/lexer.hpp"
#include "fvkit/set_algebra.hpp"

namespace fvkit {

namespace detail {

class SetFormulaParser {
public:
  explicit SetFormulaParser(std::string_view text)
      : ts_(tokenize(text, {"(+)", "(.)", "&&", "||", "!!", "==", "~", "&", "|", "(", ")", "[", "]", "."})) {}

  SetFormulaPtr parse() {
    auto f = formula();
    if (!ts_.at_end()) ts_.fail("unexpected trailing input");
    return f;
  }

  SetTermPtr parse_term_only() {
    auto t = term();
    if (!ts_.at_end()) ts_.fail("unexpected trailing input");
    return t;
  }

private:
  SetFormulaPtr formula() {
    if (ts_.is_keyword("setexists") || ts_.is_keyword("setforall")) return quantified();
    return disjunction();
  }

  SetFormulaPtr quantified() {
    bool ex = ts_.next().text == "setexists";
    std::string z = ts_.expect_ident("set variable");
    ts_.expect_symbol(".");
    auto body = formula();
    return ex ? set::exists(z, body) : set::forall(z, body);
  }

  SetFormulaPtr disjunction() {
    std::vector<SetFormulaPtr> parts{conjunction()};
    while (ts_.accept_symbol("||")) parts.push_back(conjunction());
    return set::disj(std::move(parts));
  }

  SetFormulaPtr conjunction() {
    std::vector<SetFormulaPtr> parts{negation()};
    while (ts_.accept_symbol("&&")) parts.push_back(negation());
    return set::conj(std::move(parts));
  }

  SetFormulaPtr negation() {
    if (ts_.accept_symbol("!!")) return set::negate(negation());
    if (ts_.is_keyword("setexists") || ts_.is_keyword("setforall")) return quantified();
    return atom();
  }

  SetFormulaPtr atom() {
    if (ts_.accept_keyword("true")) return set::top();
    if (ts_.accept_keyword("false")) return set::bottom();
    if (ts_.is_keyword("C") && ts_.is_symbol("[", 1)) {
      ts_.next();
      ts_.next();
      std::size_t j = ts_.expect_number("cardinality index");
      ts_.expect_symbol("]");
      ts_.expect_symbol("(");
      auto t = term();
      ts_.expect_symbol(")");
      return set::at_least(j, t);
    }
    if (ts_.is_symbol("(")) {
      // Either a parenthesized formula or a parenthesized term on the left of "==".
      std::size_t save = ts_.position();
      try {
        ts_.next();
        auto f = formula();
        ts_.expect_symbol(")");
        if (!ts_.is_symbol("==")) return f;
      } catch (const ParseError&) {
      }
      ts_.reset(save);
    }
    auto lhs = term();
    if (!ts_.accept_symbol("==")) ts_.fail("expected '==' after set term");
    return set::equal(lhs, term());
  }

  SetTermPtr term() {
    SetTermPtr acc = product();
    while (ts_.is_symbol("(+)") || ts_.is_symbol("|")) {
      bool ring = ts_.next().text == "(+)";
      std::vector<SetTermPtr> args{acc, product()};
      while (ts_.is_symbol(ring ? "(+)" : "|")) {
        ts_.next();
        args.push_back(product());
      }
      acc = ring ? set::sum(std::move(args)) : set::join(std::move(args));
    }
    return acc;
  }

  SetTermPtr product() {
    SetTermPtr acc = unary();
    while (ts_.is_symbol("(.)") || ts_.is_symbol("&")) {
      bool ring = ts_.next().text == "(.)";
      std::vector<SetTermPtr> args{acc, unary()};
      while (ts_.is_symbol(ring ? "(.)" : "&")) {
        ts_.next();
        args.push_back(unary());
      }
      acc = ring ? set::prod(std::move(args)) : set::meet(std::move(args));
    }
    return acc;
  }

  SetTermPtr unary() {
    if (ts_.accept_symbol("~")) return set::complement(unary());
    if (ts_.accept_symbol("(")) {
      auto t = term();
      ts_.expect_symbol(")");
      return t;
    }
    if (ts_.peek().kind == Token::Kind::Number) {
      const Token& t = ts_.peek();
      if (t.text == "0" || t.text == "1") {
        ts_.next();
        return t.text == "0" ? set::zero() : set::one();
      }
      ts_.fail("expected 0, 1 or a set variable");
    }
    std::string name = ts_.expect_ident("set term");
    if (name == "C" || name == "true" || name == "false" || name == "setexists" || name == "setforall")
      ts_.fail("reserved word used as set variable");
    return set::var(name);
  }

  TokenStream ts_;
};

inline void serialize_set_term(const SetTerm& t, std::string& out) {
  using K = SetTerm::Kind;
  switch (t.kind) {
  case K::Var:
    out += t.name;
    return;
  case K::Zero:
    out += "0";
    return;
  case K::One:
    out += "1";
    return;
  case K::Complement:
    out += "~";
    serialize_set_term(*t.args[0], out);
    return;
  default: {
    const char* op = t.kind == K::Meet ? " & " : t.kind == K::Join ? " | " : t.kind == K::Sum ? " (+) " : " (.) ";
    out += "(";
    for (std::size_t i = 0; i < t.args.size(); ++i) {
      if (i) out += op;
      serialize_set_term(*t.args[i], out);
    }
    out += ")";
  }
  }
}

inline void serialize_set_formula(const SetFormula& f, bool open, std::string& out) {
  using K = SetFormula::Kind;
  switch (f.kind) {
  case K::True:
    out += "true";
    return;
  case K::False:
    out += "false";
    return;
  case K::Equal:
    serialize_set_term(*f.terms[0], out);
    out += " == ";
    serialize_set_term(*f.terms[1], out);
    return;
  case K::AtLeast:
    out += "C[" + std::to_string(f.bound) + "](";
    serialize_set_term(*f.terms[0], out);
    out += ")";
    return;
  case K::Not:
    out += "!!";
    serialize_set_formula(*f.children[0], false, out);
    return;
  case K::And:
  case K::Or:
    out += "(";
    for (std::size_t i = 0; i < f.children.size(); ++i) {
      if (i) out += f.kind == K::And ? " && " : " || ";
      serialize_set_formula(*f.children[i], false, out);
    }
    out += ")";
    return;
  case K::Exists:
  case K::Forall:
    if (!open) out += "(";
    out += f.kind == K::Exists ? "setexists " : "setforall ";
    out += f.var + ". ";
    serialize_set_formula(*f.children[0], true, out);
    if (!open) out += ")";
    return;
  }
}

} // namespace detail

inline SetFormulaPtr parse_set_formula(std::string_view text) { return detail::SetFormulaParser(text).parse(); }

inline SetTermPtr parse_set_term(std::string_view text) { return detail::SetFormulaParser(text).parse_term_only(); }

inline std::string serialize_set_term(const SetTerm& t) {
  std::string out;
  detail::serialize_set_term(t, out);
  return out;
}

inline std::string serialize_set_formula(const SetFormula& f) {
  std::string out;
  detail::serialize_set_formula(f, true, out);
  return out;
}

} // namespace fvkit

#endif
