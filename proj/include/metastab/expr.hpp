#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "metastab/errors.hpp"
#include "metastab/lexer.hpp"
#include "metastab/rational.hpp"

namespace metastab {

// Exact-arithmetic expression language for closed-form sequences.
//
//   expr    := ['-'] term (('+'|'-') term)*
//   term    := factor (('*'|'/') factor)*
//   factor  := base ['^' factor]                      (right associative)
//   base    := integer | variable | 'pow' '(' expr ',' expr ')'
//            | 'mod' '(' expr ',' expr ')'
//            | 'ite' '(' cond ',' expr ',' expr ')' | '(' expr ')'
//   cond    := expr ('<'|'<='|'='|'>='|'>') expr
//
// Rationals are written p/q (exact division of integer literals), so the
// grammar needs no dedicated rational token. pow(a, b) and a^b build the
// same node; the canonical printer emits '^'. Division by zero is rejected
// at validation time where the divisor folds to a constant, otherwise it is
// a per-index evaluation error. mod and exponents require integer operands
// at evaluation time. ite evaluates only the selected branch.

enum class expr_op { literal, variable, add, sub, mul, div, pow, mod, ite, neg };
enum class cmp_op { lt, le, eq, ge, gt };

inline const char* to_string(cmp_op c) {
  switch (c) {
    case cmp_op::lt: return "<";
    case cmp_op::le: return "<=";
    case cmp_op::eq: return "=";
    case cmp_op::ge: return ">=";
    case cmp_op::gt: return ">";
  }
  return "?";
}

struct expr_node;
using expr = std::shared_ptr<const expr_node>;

struct expr_node {
  expr_op op;
  bigint literal{};          // op == literal
  std::string variable;      // op == variable
  cmp_op cond_op = cmp_op::lt;  // op == ite
  expr a, b, c, d;           // children: ite uses a (cmp lhs), b (cmp rhs), c, d
  std::size_t pos = 0;       // source offset, ignored by equality
};

inline expr make_literal(bigint v, std::size_t pos = 0) {
  return std::make_shared<expr_node>(expr_node{expr_op::literal, std::move(v), "", cmp_op::lt,
                                               nullptr, nullptr, nullptr, nullptr, pos});
}
inline expr make_variable(std::string name, std::size_t pos = 0) {
  return std::make_shared<expr_node>(expr_node{expr_op::variable, bigint(0), std::move(name),
                                               cmp_op::lt, nullptr, nullptr, nullptr, nullptr,
                                               pos});
}
inline expr make_binary(expr_op op, expr lhs, expr rhs, std::size_t pos = 0) {
  return std::make_shared<expr_node>(expr_node{op, bigint(0), "", cmp_op::lt, std::move(lhs),
                                               std::move(rhs), nullptr, nullptr, pos});
}
inline expr make_neg(expr operand, std::size_t pos = 0) {
  return std::make_shared<expr_node>(expr_node{expr_op::neg, bigint(0), "", cmp_op::lt,
                                               std::move(operand), nullptr, nullptr, nullptr,
                                               pos});
}
inline expr make_ite(cmp_op c, expr lhs, expr rhs, expr then_e, expr else_e,
                     std::size_t pos = 0) {
  return std::make_shared<expr_node>(expr_node{expr_op::ite, bigint(0), "", c, std::move(lhs),
                                               std::move(rhs), std::move(then_e),
                                               std::move(else_e), pos});
}

// Convenience for building exact constants programmatically: integers map to
// literals, anything else to literal/literal.
inline expr make_rational_const(const rational& r) {
  bigint num = boost::multiprecision::numerator(r);
  bigint den = boost::multiprecision::denominator(r);
  if (den == 1) return num < 0 ? make_neg(make_literal(-num)) : make_literal(num);
  expr e = make_binary(expr_op::div, make_literal(num < 0 ? bigint(-num) : num),
                       make_literal(den));
  return num < 0 ? make_neg(e) : e;
}

inline bool expr_equal(const expr& lhs, const expr& rhs) {
  if (lhs == rhs) return true;
  if (!lhs || !rhs) return false;
  if (lhs->op != rhs->op) return false;
  switch (lhs->op) {
    case expr_op::literal: return lhs->literal == rhs->literal;
    case expr_op::variable: return lhs->variable == rhs->variable;
    case expr_op::ite:
      if (lhs->cond_op != rhs->cond_op) return false;
      return expr_equal(lhs->a, rhs->a) && expr_equal(lhs->b, rhs->b) &&
             expr_equal(lhs->c, rhs->c) && expr_equal(lhs->d, rhs->d);
    case expr_op::neg: return expr_equal(lhs->a, rhs->a);
    default: return expr_equal(lhs->a, rhs->a) && expr_equal(lhs->b, rhs->b);
  }
}

namespace detail {

class expr_parser {
public:
  expr_parser(std::string_view text, std::vector<std::string> variables)
      : cursor_(lex(text)), variables_(std::move(variables)) {}

  expr parse() {
    expr e = parse_expr();
    if (!cursor_.done())
      throw parse_error("trailing input " + token_cursor::describe(cursor_.peek()),
                        cursor_.peek().pos);
    return e;
  }

private:
  expr parse_expr() {
    std::size_t pos = cursor_.peek().pos;
    expr e;
    if (cursor_.accept_punct("-"))
      e = make_neg(parse_term(), pos);
    else
      e = parse_term();
    for (;;) {
      std::size_t opos = cursor_.peek().pos;
      if (cursor_.accept_punct("+"))
        e = make_binary(expr_op::add, e, parse_term(), opos);
      else if (cursor_.accept_punct("-"))
        e = make_binary(expr_op::sub, e, parse_term(), opos);
      else
        return e;
    }
  }

  expr parse_term() {
    expr e = parse_factor();
    for (;;) {
      std::size_t opos = cursor_.peek().pos;
      if (cursor_.accept_punct("*"))
        e = make_binary(expr_op::mul, e, parse_factor(), opos);
      else if (cursor_.accept_punct("/"))
        e = make_binary(expr_op::div, e, parse_factor(), opos);
      else
        return e;
    }
  }

  expr parse_factor() {
    expr base = parse_base();
    std::size_t opos = cursor_.peek().pos;
    if (cursor_.accept_punct("^"))
      return make_binary(expr_op::pow, base, parse_factor(), opos);
    return base;
  }

  expr parse_base() {
    const token& t = cursor_.peek();
    if (t.kind == token_kind::integer) {
      cursor_.next();
      return make_literal(bigint(t.text), t.pos);
    }
    if (t.kind == token_kind::ident) {
      if (t.text == "pow" || t.text == "mod") {
        expr_op op = t.text == "pow" ? expr_op::pow : expr_op::mod;
        std::size_t pos = t.pos;
        cursor_.next();
        cursor_.expect_punct("(");
        expr lhs = parse_expr();
        cursor_.expect_punct(",");
        expr rhs = parse_expr();
        cursor_.expect_punct(")");
        return make_binary(op, std::move(lhs), std::move(rhs), pos);
      }
      if (t.text == "ite") {
        std::size_t pos = t.pos;
        cursor_.next();
        cursor_.expect_punct("(");
        expr lhs = parse_expr();
        cmp_op c = parse_cmp_op();
        expr rhs = parse_expr();
        cursor_.expect_punct(",");
        expr then_e = parse_expr();
        cursor_.expect_punct(",");
        expr else_e = parse_expr();
        cursor_.expect_punct(")");
        return make_ite(c, std::move(lhs), std::move(rhs), std::move(then_e),
                        std::move(else_e), pos);
      }
      for (const auto& v : variables_) {
        if (t.text == v) {
          cursor_.next();
          return make_variable(v, t.pos);
        }
      }
      throw parse_error("unknown name '" + t.text + "'", t.pos);
    }
    if (cursor_.accept_punct("(")) {
      expr e = parse_expr();
      cursor_.expect_punct(")");
      return e;
    }
    throw parse_error("expected a value, found " + token_cursor::describe(t), t.pos);
  }

  cmp_op parse_cmp_op() {
    const token& t = cursor_.peek();
    if (t.kind == token_kind::punct) {
      if (t.text == "<") { cursor_.next(); return cmp_op::lt; }
      if (t.text == "<=") { cursor_.next(); return cmp_op::le; }
      if (t.text == "=") { cursor_.next(); return cmp_op::eq; }
      if (t.text == ">=") { cursor_.next(); return cmp_op::ge; }
      if (t.text == ">") { cursor_.next(); return cmp_op::gt; }
    }
    throw parse_error("expected comparison operator, found " + token_cursor::describe(t),
                      t.pos);
  }

  token_cursor cursor_;
  std::vector<std::string> variables_;
};

// Precedence levels for the canonical printer.
enum : int { prec_expr = 0, prec_term = 1, prec_factor = 2, prec_base = 3 };

inline int expr_prec(const expr& e) {
  switch (e->op) {
    case expr_op::add:
    case expr_op::sub:
    case expr_op::neg: return prec_expr;
    case expr_op::mul:
    case expr_op::div: return prec_term;
    case expr_op::pow: return prec_factor;
    default: return prec_base;
  }
}

inline void print_expr(std::ostream& os, const expr& e, int min_prec);

inline void print_child(std::ostream& os, const expr& child, int child_min_prec) {
  if (expr_prec(child) < child_min_prec) {
    os << "(";
    print_expr(os, child, prec_expr);
    os << ")";
  } else {
    print_expr(os, child, child_min_prec);
  }
}

inline void print_expr(std::ostream& os, const expr& e, int min_prec) {
  (void)min_prec;
  switch (e->op) {
    case expr_op::literal: os << e->literal.str(); return;
    case expr_op::variable: os << e->variable; return;
    case expr_op::neg:
      os << "-";
      print_child(os, e->a, prec_term);
      return;
    case expr_op::add:
      print_child(os, e->a, prec_expr);
      os << " + ";
      print_child(os, e->b, prec_term);  // right operand must not restart a +/- chain
      return;
    case expr_op::sub:
      print_child(os, e->a, prec_expr);
      os << " - ";
      print_child(os, e->b, prec_term);
      return;
    case expr_op::mul:
      print_child(os, e->a, prec_term);
      os << " * ";
      print_child(os, e->b, prec_factor);
      return;
    case expr_op::div:
      print_child(os, e->a, prec_term);
      os << "/";
      print_child(os, e->b, prec_factor);
      return;
    case expr_op::pow:
      print_child(os, e->a, prec_base);
      os << "^";
      print_child(os, e->b, prec_factor);
      return;
    case expr_op::mod:
      os << "mod(";
      print_expr(os, e->a, prec_expr);
      os << ", ";
      print_expr(os, e->b, prec_expr);
      os << ")";
      return;
    case expr_op::ite:
      os << "ite(";
      print_expr(os, e->a, prec_expr);
      os << " " << to_string(e->cond_op) << " ";
      print_expr(os, e->b, prec_expr);
      os << ", ";
      print_expr(os, e->c, prec_expr);
      os << ", ";
      print_expr(os, e->d, prec_expr);
      os << ")";
      return;
  }
}

} // namespace detail

inline std::string print_expr(const expr& e) {
  std::ostringstream os;
  detail::print_expr(os, e, detail::prec_expr);
  return os.str();
}

// Evaluation environment: variable name -> exact value.
using expr_env = std::map<std::string, rational, std::less<>>;

namespace detail {

constexpr long max_exponent_magnitude = 4096;

inline long to_long_exponent(const rational& v, std::size_t index) {
  if (boost::multiprecision::denominator(v) != 1)
    throw eval_error("exponent is not an integer: " + to_string(v), index);
  bigint n = boost::multiprecision::numerator(v);
  if (n > max_exponent_magnitude || n < -max_exponent_magnitude)
    throw eval_error("exponent magnitude exceeds " + std::to_string(max_exponent_magnitude),
                     index);
  return n.convert_to<long>();
}

inline bool eval_cmp(cmp_op c, const rational& lhs, const rational& rhs) {
  switch (c) {
    case cmp_op::lt: return lhs < rhs;
    case cmp_op::le: return lhs <= rhs;
    case cmp_op::eq: return lhs == rhs;
    case cmp_op::ge: return lhs >= rhs;
    case cmp_op::gt: return lhs > rhs;
  }
  return false;
}

inline rational eval_expr(const expr& e, const expr_env& env, std::size_t index) {
  switch (e->op) {
    case expr_op::literal: return rational(e->literal);
    case expr_op::variable: {
      auto it = env.find(e->variable);
      if (it == env.end())
        throw eval_error("unbound variable '" + e->variable + "'", index);
      return it->second;
    }
    case expr_op::neg: return -eval_expr(e->a, env, index);
    case expr_op::add: return eval_expr(e->a, env, index) + eval_expr(e->b, env, index);
    case expr_op::sub: return eval_expr(e->a, env, index) - eval_expr(e->b, env, index);
    case expr_op::mul: return eval_expr(e->a, env, index) * eval_expr(e->b, env, index);
    case expr_op::div: {
      rational lhs = eval_expr(e->a, env, index);
      rational rhs = eval_expr(e->b, env, index);
      if (rhs == 0) throw eval_error("division by zero", index);
      return lhs / rhs;
    }
    case expr_op::pow: {
      rational base = eval_expr(e->a, env, index);
      long exponent = to_long_exponent(eval_expr(e->b, env, index), index);
      if (base == 0 && exponent < 0) throw eval_error("zero raised to a negative power", index);
      return rational_pow(base, exponent);
    }
    case expr_op::mod: {
      rational lhs = eval_expr(e->a, env, index);
      rational rhs = eval_expr(e->b, env, index);
      if (boost::multiprecision::denominator(lhs) != 1 ||
          boost::multiprecision::denominator(rhs) != 1)
        throw eval_error("mod requires integer operands", index);
      bigint a = boost::multiprecision::numerator(lhs);
      bigint b = boost::multiprecision::numerator(rhs);
      if (b == 0) throw eval_error("mod by zero", index);
      bigint r = a % b;  // truncated; normalize so the result has b's sign
      if (r != 0 && ((r < 0) != (b < 0))) r += b;
      return rational(r);
    }
    case expr_op::ite: {
      bool taken = eval_cmp(e->cond_op, eval_expr(e->a, env, index),
                            eval_expr(e->b, env, index));
      return eval_expr(taken ? e->c : e->d, env, index);  // lazy: only one branch
    }
  }
  throw internal_error("unhandled expression node");
}

// Constant folding over variable-free subtrees; used to reject statically
// detectable division/mod by zero and 0^negative at validation time.
inline std::optional<rational> fold_constant(const expr& e) {
  switch (e->op) {
    case expr_op::literal: return rational(e->literal);
    case expr_op::variable: return std::nullopt;
    case expr_op::neg: {
      auto v = fold_constant(e->a);
      return v ? std::optional<rational>(-*v) : std::nullopt;
    }
    case expr_op::add:
    case expr_op::sub:
    case expr_op::mul: {
      auto lhs = fold_constant(e->a), rhs = fold_constant(e->b);
      if (!lhs || !rhs) return std::nullopt;
      if (e->op == expr_op::add) return *lhs + *rhs;
      if (e->op == expr_op::sub) return *lhs - *rhs;
      return *lhs * *rhs;
    }
    case expr_op::div: {
      auto rhs = fold_constant(e->b);
      if (rhs && *rhs == 0) throw parse_error("division by zero", e->pos);
      auto lhs = fold_constant(e->a);
      if (!lhs || !rhs) return std::nullopt;
      return *lhs / *rhs;
    }
    case expr_op::pow: {
      auto base = fold_constant(e->a), exponent = fold_constant(e->b);
      if (exponent && boost::multiprecision::denominator(*exponent) == 1 && base &&
          *base == 0 && *exponent < 0)
        throw parse_error("zero raised to a negative power", e->pos);
      if (!base || !exponent) return std::nullopt;
      if (boost::multiprecision::denominator(*exponent) != 1) return std::nullopt;
      bigint n = boost::multiprecision::numerator(*exponent);
      if (n > detail::max_exponent_magnitude || n < -detail::max_exponent_magnitude)
        return std::nullopt;
      return rational_pow(*base, n.convert_to<long>());
    }
    case expr_op::mod: {
      auto lhs = fold_constant(e->a), rhs = fold_constant(e->b);
      if (rhs && *rhs == 0) throw parse_error("mod by zero", e->pos);
      if (!lhs || !rhs || boost::multiprecision::denominator(*lhs) != 1 ||
          boost::multiprecision::denominator(*rhs) != 1)
        return std::nullopt;
      bigint a = boost::multiprecision::numerator(*lhs);
      bigint b = boost::multiprecision::numerator(*rhs);
      bigint r = a % b;
      if (r != 0 && ((r < 0) != (b < 0))) r += b;
      return rational(r);
    }
    case expr_op::ite: {
      auto lhs = fold_constant(e->a), rhs = fold_constant(e->b);
      // Branches are validated independently of the guard: a branch that can
      // never be selected still must be statically sound when constant.
      auto then_v = fold_constant(e->c), else_v = fold_constant(e->d);
      if (lhs && rhs) return eval_cmp(e->cond_op, *lhs, *rhs) ? then_v : else_v;
      return std::nullopt;
    }
  }
  return std::nullopt;
}

} // namespace detail

inline void validate_expr(const expr& e) { (void)detail::fold_constant(e); }

// Parse a sequence expression over the single variable n, validated.
inline expr parse_sequence_expr(std::string_view text) {
  expr e = detail::expr_parser(text, {"n"}).parse();
  validate_expr(e);
  return e;
}

// Parse an expression over caller-chosen variable names (used by rate
// expressions), validated.
inline expr parse_expr_with_vars(std::string_view text, std::vector<std::string> variables) {
  expr e = detail::expr_parser(text, std::move(variables)).parse();
  validate_expr(e);
  return e;
}

inline rational eval_sequence_expr(const expr& e, std::size_t n) {
  expr_env env;
  env.emplace("n", rational(n));
  return detail::eval_expr(e, env, n);
}

inline rational eval_expr_env(const expr& e, const expr_env& env) {
  return detail::eval_expr(e, env, 0);
}

} // namespace metastab
