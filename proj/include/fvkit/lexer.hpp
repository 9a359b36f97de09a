#ifndef FVKIT_LEXER_HPP
#define FVKIT_LEXER_HPP

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "fvkit/error.hpp"

namespace fvkit::detail {

struct Token {
  enum class Kind { Ident, Number, Symbol, End };

  Kind kind;
  std::string text;
  std::size_t line;
  std::size_t column;
};

/// Splits text into identifiers, decimal numbers and punctuation drawn from a
/// caller-supplied symbol list (longest match wins). '#' starts a comment.
inline std::vector<Token> tokenize(std::string_view text, std::vector<std::string> symbols) {
  std::sort(symbols.begin(), symbols.end(),
            [](const std::string& a, const std::string& b) { return a.size() > b.size(); });
  std::vector<Token> out;
  std::size_t line = 1, col = 1, i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < text.size()) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    if (std::isspace(c)) {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    std::size_t l = line, cl = col, start = i;
    if (std::isalpha(c) || c == '_') {
      std::size_t j = i;
      while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_' ||
                                 text[j] == '\''))
        ++j;
      advance(j - i);
      out.push_back({Token::Kind::Ident, std::string(text.substr(start, i - start)), l, cl});
      continue;
    }
    if (std::isdigit(c)) {
      std::size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      advance(j - i);
      out.push_back({Token::Kind::Number, std::string(text.substr(start, i - start)), l, cl});
      continue;
    }
    bool matched = false;
    for (const auto& s : symbols) {
      if (text.substr(i, s.size()) == s) {
        advance(s.size());
        out.push_back({Token::Kind::Symbol, s, l, cl});
        matched = true;
        break;
      }
    }
    if (!matched) throw ParseError(std::string("unexpected character '") + text[i] + "'", l, cl);
  }
  out.push_back({Token::Kind::End, "", line, col});
  return out;
}

/// Cursor over a token vector with the usual expect/accept helpers.
class TokenStream {
public:
  explicit TokenStream(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  const Token& next() {
    const Token& t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }
  bool at_end() const { return peek().kind == Token::Kind::End; }

  bool is_symbol(std::string_view s, std::size_t ahead = 0) const {
    return peek(ahead).kind == Token::Kind::Symbol && peek(ahead).text == s;
  }
  bool is_keyword(std::string_view s) const {
    return peek().kind == Token::Kind::Ident && peek().text == s;
  }
  bool accept_symbol(std::string_view s) {
    if (!is_symbol(s)) return false;
    next();
    return true;
  }
  bool accept_keyword(std::string_view s) {
    if (!is_keyword(s)) return false;
    next();
    return true;
  }
  void expect_symbol(std::string_view s) {
    if (!accept_symbol(s)) fail("expected '" + std::string(s) + "'");
  }
  std::string expect_ident(std::string_view what = "identifier") {
    if (peek().kind != Token::Kind::Ident) fail("expected " + std::string(what));
    return next().text;
  }
  std::size_t expect_number(std::string_view what = "number") {
    if (peek().kind != Token::Kind::Number) fail("expected " + std::string(what));
    const Token& t = next();
    try {
      return static_cast<std::size_t>(std::stoull(t.text));
    } catch (const std::exception&) {
      throw ParseError("number out of range", t.line, t.column);
    }
  }

  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = peek();
    std::string found = t.kind == Token::Kind::End ? "end of input" : "'" + t.text + "'";
    throw ParseError(msg + ", found " + found, t.line, t.column);
  }

  std::size_t position() const { return pos_; }
  void reset(std::size_t pos) { pos_ = pos; }

private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

} // namespace fvkit::detail

#endif
