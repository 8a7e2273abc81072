#pragma once

#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "metastab/errors.hpp"

namespace metastab::detail {

enum class token_kind { integer, ident, punct, end };

struct token {
  token_kind kind;
  std::string text;
  std::size_t pos;  // 0-based character offset of the first character
};

// Tiny hand-rolled lexer shared by the sequence-expression and formula
// grammars. Punctuation covers ( ) , + - * / ^ and the comparison operators
// < <= = >= >.
inline std::vector<token> lex(std::string_view src) {
  std::vector<token> out;
  std::size_t i = 0;
  auto peek = [&](std::size_t k) -> char { return i + k < src.size() ? src[i + k] : '\0'; };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t b = i;
      while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
      out.push_back({token_kind::integer, std::string(src.substr(b, i - b)), b});
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t b = i;
      while (i < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_'))
        ++i;
      out.push_back({token_kind::ident, std::string(src.substr(b, i - b)), b});
      continue;
    }
    if (c == '<' || c == '>') {
      std::string t(1, c);
      if (peek(1) == '=') t += '=';
      out.push_back({token_kind::punct, t, i});
      i += t.size();
      continue;
    }
    if (c == '(' || c == ')' || c == ',' || c == '+' || c == '-' || c == '*' || c == '/' ||
        c == '^' || c == '=') {
      out.push_back({token_kind::punct, std::string(1, c), i});
      ++i;
      continue;
    }
    throw parse_error("unexpected character '" + std::string(1, c) + "'", i);
  }
  out.push_back({token_kind::end, "", src.size()});
  return out;
}

// Cursor over a token stream with the usual expect/accept helpers.
class token_cursor {
public:
  explicit token_cursor(std::vector<token> tokens) : tokens_(std::move(tokens)) {}

  const token& peek() const { return tokens_[at_]; }
  const token& next() { return tokens_[at_ < tokens_.size() - 1 ? at_++ : at_]; }
  bool done() const { return tokens_[at_].kind == token_kind::end; }

  bool accept_punct(std::string_view p) {
    if (peek().kind == token_kind::punct && peek().text == p) {
      next();
      return true;
    }
    return false;
  }

  token expect_punct(std::string_view p) {
    if (peek().kind != token_kind::punct || peek().text != p)
      throw parse_error("expected '" + std::string(p) + "', found " + describe(peek()),
                        peek().pos);
    return next();
  }

  static std::string describe(const token& t) {
    switch (t.kind) {
      case token_kind::end: return "end of input";
      case token_kind::integer: return "number '" + t.text + "'";
      default: return "'" + t.text + "'";
    }
  }

private:
  std::vector<token> tokens_;
  std::size_t at_ = 0;
};

} // namespace metastab::detail
