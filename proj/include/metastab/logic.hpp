#pragma once

#include <algorithm>
#include <cstddef>
#include <istream>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "metastab/errors.hpp"
#include "metastab/funcspace.hpp"
#include "metastab/lexer.hpp"
#include "metastab/rational.hpp"

namespace metastab {

namespace detail {
inline bool is_ident_name(const std::string& s) {
  if (s.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

inline bool is_connective_name(const std::string& s) {
  return s == "neg" || s == "min" || s == "max" || s == "half" || s == "dotminus";
}
} // namespace detail

// A finite propositional signature: ordered unique atom names.
class language {
public:
  explicit language(std::vector<std::string> atoms) : atoms_(std::move(atoms)) {
    if (atoms_.empty()) throw config_error("language needs at least one atom");
    for (const std::string& a : atoms_) {
      if (!detail::is_ident_name(a))
        throw config_error("atom name '" + a + "' is not an identifier");
      if (detail::is_connective_name(a) || a == "n")
        throw config_error("atom name '" + a + "' collides with a reserved word");
    }
    std::vector<std::string> sorted = atoms_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw config_error("atom names must be unique");
  }

  std::size_t size() const noexcept { return atoms_.size(); }
  const std::string& atom(std::size_t i) const {
    if (i >= atoms_.size())
      throw lookup_error("atom index " + std::to_string(i) + " out of range (size " +
                         std::to_string(atoms_.size()) + ")");
    return atoms_[i];
  }
  std::optional<std::size_t> index_of(const std::string& name) const {
    for (std::size_t i = 0; i < atoms_.size(); ++i)
      if (atoms_[i] == name) return i;
    return std::nullopt;
  }
  const std::vector<std::string>& atoms() const noexcept { return atoms_; }

private:
  std::vector<std::string> atoms_;
};

// [0,1]-valued formulas. half_n is the template-only connective half^n: it
// stands for an n-fold application of half and must be instantiated with a
// concrete n before evaluation.
enum class formula_op { atom, constant, neg, fmin, fmax, half, dotminus, half_n };

struct formula_node;
using formula = std::shared_ptr<const formula_node>;

struct formula_node {
  formula_op op;
  std::size_t atom_index = 0;  // atom
  std::string atom_name;       // atom
  rational value;              // constant
  formula a, b;
};

inline formula f_atom(std::size_t index, std::string name) {
  auto n = std::make_shared<formula_node>();
  n->op = formula_op::atom;
  n->atom_index = index;
  n->atom_name = std::move(name);
  return n;
}
inline formula f_const(rational v) {
  if (v < 0 || v > 1) throw config_error("formula constant " + to_string(v) + " outside [0,1]");
  auto n = std::make_shared<formula_node>();
  n->op = formula_op::constant;
  n->value = std::move(v);
  return n;
}
inline formula f_unary(formula_op op, formula a) {
  auto n = std::make_shared<formula_node>();
  n->op = op;
  n->a = std::move(a);
  return n;
}
inline formula f_binary(formula_op op, formula a, formula b) {
  auto n = std::make_shared<formula_node>();
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}
inline formula f_neg(formula a) { return f_unary(formula_op::neg, std::move(a)); }
inline formula f_half(formula a) { return f_unary(formula_op::half, std::move(a)); }
inline formula f_min(formula a, formula b) {
  return f_binary(formula_op::fmin, std::move(a), std::move(b));
}
inline formula f_max(formula a, formula b) {
  return f_binary(formula_op::fmax, std::move(a), std::move(b));
}
inline formula f_dotminus(formula a, formula b) {
  return f_binary(formula_op::dotminus, std::move(a), std::move(b));
}

// A structure is a valuation of the atoms, aligned with language order.
struct structure_valuation {
  std::vector<rational> values;

  bool operator==(const structure_valuation&) const = default;
};

inline structure_valuation make_valuation(const language& lang, std::vector<rational> values) {
  if (values.size() != lang.size())
    throw config_error("valuation has " + std::to_string(values.size()) + " values for " +
                       std::to_string(lang.size()) + " atoms");
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i] < 0 || values[i] > 1)
      throw config_error("valuation of atom '" + lang.atom(i) + "' is " +
                         to_string(values[i]) + ", outside [0,1]");
  return structure_valuation{std::move(values)};
}

// Every connective maps [0,1] values back into [0,1], so evaluation does too.
inline rational eval_formula(const formula& f, const structure_valuation& s) {
  switch (f->op) {
    case formula_op::atom:
      if (f->atom_index >= s.values.size())
        throw internal_error("formula atom index " + std::to_string(f->atom_index) +
                             " outside the valuation");
      return s.values[f->atom_index];
    case formula_op::constant: return f->value;
    case formula_op::neg: return rational(1) - eval_formula(f->a, s);
    case formula_op::fmin: return std::min(eval_formula(f->a, s), eval_formula(f->b, s));
    case formula_op::fmax: return std::max(eval_formula(f->a, s), eval_formula(f->b, s));
    case formula_op::half: return eval_formula(f->a, s) / 2;
    case formula_op::dotminus: {
      rational d = eval_formula(f->a, s) - eval_formula(f->b, s);
      return d > 0 ? d : rational(0);
    }
    case formula_op::half_n:
      throw internal_error("half^n template evaluated without instantiation");
  }
  throw internal_error("unhandled formula op");
}

// Truth is value exactly 1.
inline bool satisfies(const structure_valuation& s, const formula& f) {
  return eval_formula(f, s) == 1;
}

inline bool satisfies_all(const structure_valuation& s, const std::vector<formula>& theory) {
  for (const formula& f : theory)
    if (!satisfies(s, f)) return false;
  return true;
}

// A modulus L(phi) with |phi(M) - phi(N)| <= L(phi) * max-atom-difference.
// neg and min/max preserve the modulus, half contracts it, and dotminus adds
// its sides' moduli: both arguments can move the value in the same direction
// (dotminus(p, q) moves by 1 in each coordinate direction at (1, 0), so no
// bound uniform in the connective count exists for it).
inline rational lipschitz_bound(const formula& f) {
  switch (f->op) {
    case formula_op::atom: return rational(1);
    case formula_op::constant: return rational(0);
    case formula_op::neg: return lipschitz_bound(f->a);
    case formula_op::fmin:
    case formula_op::fmax: return std::max(lipschitz_bound(f->a), lipschitz_bound(f->b));
    case formula_op::half: return lipschitz_bound(f->a) / 2;
    case formula_op::dotminus: return lipschitz_bound(f->a) + lipschitz_bound(f->b);
    case formula_op::half_n:
      // Instantiation only shrinks the modulus (half^n contracts by 2^-n).
      return lipschitz_bound(f->a);
  }
  throw internal_error("unhandled formula op");
}

inline bool uses_dotminus(const formula& f) {
  if (f->op == formula_op::dotminus) return true;
  if (f->a && uses_dotminus(f->a)) return true;
  return f->b && uses_dotminus(f->b);
}

// Canonical printing; parse(print(f)) == f up to node identity.
inline std::string print_formula(const formula& f) {
  switch (f->op) {
    case formula_op::atom: return f->atom_name;
    case formula_op::constant: return to_string(f->value);
    case formula_op::neg: return "neg(" + print_formula(f->a) + ")";
    case formula_op::fmin:
      return "min(" + print_formula(f->a) + ", " + print_formula(f->b) + ")";
    case formula_op::fmax:
      return "max(" + print_formula(f->a) + ", " + print_formula(f->b) + ")";
    case formula_op::half: return "half(" + print_formula(f->a) + ")";
    case formula_op::dotminus:
      return "dotminus(" + print_formula(f->a) + ", " + print_formula(f->b) + ")";
    case formula_op::half_n: return "half^n(" + print_formula(f->a) + ")";
  }
  throw internal_error("unhandled formula op");
}

inline bool formula_equal(const formula& x, const formula& y) {
  if (x->op != y->op) return false;
  switch (x->op) {
    case formula_op::atom: return x->atom_index == y->atom_index && x->atom_name == y->atom_name;
    case formula_op::constant: return x->value == y->value;
    case formula_op::neg:
    case formula_op::half:
    case formula_op::half_n: return formula_equal(x->a, y->a);
    default: return formula_equal(x->a, y->a) && formula_equal(x->b, y->b);
  }
}

namespace detail {

// formula := connective '(' args ')' | atom | rational
// rational := integer ['/' integer], value in [0,1]
// 'half' '^' 'n' '(' formula ')' is accepted only in template mode.
class formula_parser {
public:
  formula_parser(std::string_view text, const language& lang, bool allow_half_n)
      : cur_(lex(text)), lang_(lang), allow_half_n_(allow_half_n) {}

  formula parse() {
    formula f = parse_formula();
    if (!cur_.done())
      throw parse_error("unexpected trailing " + token_cursor::describe(cur_.peek()),
                        cur_.peek().pos);
    return f;
  }

private:
  formula parse_formula() {
    const token& t = cur_.peek();
    if (t.kind == token_kind::integer) return parse_constant();
    if (t.kind != token_kind::ident)
      throw parse_error("expected a formula, found " + token_cursor::describe(t), t.pos);
    if (!is_connective_name(t.text)) {
      auto idx = lang_.index_of(t.text);
      if (!idx) throw parse_error("unknown atom '" + t.text + "'", t.pos);
      cur_.next();
      return f_atom(*idx, t.text);
    }
    std::string name = t.text;
    std::size_t pos = t.pos;
    cur_.next();
    if (name == "half" && cur_.accept_punct("^")) {
      const token& n = cur_.peek();
      if (n.kind != token_kind::ident || n.text != "n")
        throw parse_error("expected 'n' after 'half^', found " + token_cursor::describe(n),
                          n.pos);
      if (!allow_half_n_)
        throw parse_error("'half^n' is only valid in a sentence template", pos);
      cur_.next();
      cur_.expect_punct("(");
      formula a = parse_formula();
      cur_.expect_punct(")");
      return f_unary(formula_op::half_n, std::move(a));
    }
    cur_.expect_punct("(");
    formula a = parse_formula();
    if (name == "neg" || name == "half") {
      cur_.expect_punct(")");
      return name == "neg" ? f_neg(std::move(a)) : f_half(std::move(a));
    }
    cur_.expect_punct(",");
    formula b = parse_formula();
    cur_.expect_punct(")");
    if (name == "min") return f_min(std::move(a), std::move(b));
    if (name == "max") return f_max(std::move(a), std::move(b));
    return f_dotminus(std::move(a), std::move(b));
  }

  formula parse_constant() {
    const token& num = cur_.peek();
    std::size_t pos = num.pos;
    bigint p(num.text);
    cur_.next();
    bigint q(1);
    if (cur_.accept_punct("/")) {
      const token& den = cur_.peek();
      if (den.kind != token_kind::integer)
        throw parse_error("expected a denominator, found " + token_cursor::describe(den),
                          den.pos);
      q = bigint(den.text);
      if (q == 0) throw parse_error("division by zero in constant", den.pos);
      cur_.next();
    }
    rational v(p, q);
    if (v > 1) throw parse_error("constant " + to_string(v) + " outside [0,1]", pos);
    return f_const(std::move(v));
  }

  token_cursor cur_;
  const language& lang_;
  bool allow_half_n_;
};

} // namespace detail

inline formula parse_formula(const std::string& text, const language& lang) {
  return detail::formula_parser(text, lang, false).parse();
}

// Like parse_formula but accepts the half^n connective.
inline formula parse_sentence_template(const std::string& text, const language& lang) {
  return detail::formula_parser(text, lang, true).parse();
}

// Replace every half^n node by n nested halves around its (instantiated) child.
inline formula instantiate_template(const formula& tmpl, std::size_t n) {
  switch (tmpl->op) {
    case formula_op::atom:
    case formula_op::constant: return tmpl;
    case formula_op::half_n: {
      formula f = instantiate_template(tmpl->a, n);
      for (std::size_t i = 0; i < n; ++i) f = f_half(std::move(f));
      return f;
    }
    default: {
      formula a = instantiate_template(tmpl->a, n);
      if (!tmpl->b) return f_unary(tmpl->op, std::move(a));
      return f_binary(tmpl->op, std::move(a), instantiate_template(tmpl->b, n));
    }
  }
}

// phi_n = template[n := n], n < horizon.
inline std::vector<formula> expand_template(const formula& tmpl, std::size_t horizon) {
  if (horizon < 1) throw config_error("sentence sequence needs horizon >= 1");
  std::vector<formula> out;
  out.reserve(horizon);
  for (std::size_t n = 0; n < horizon; ++n) out.push_back(instantiate_template(tmpl, n));
  return out;
}

namespace detail {

inline parse_error at_line(std::size_t lineno, const parse_error& e) {
  return parse_error("line " + std::to_string(lineno) + ": " + e.raw_message(), e.position());
}

} // namespace detail

// One formula per nonblank line.
inline std::vector<formula> parse_theory_file(std::istream& is, const language& lang) {
  std::vector<formula> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::string t = detail::trim(line);
    if (t.empty()) continue;
    try {
      out.push_back(parse_formula(t, lang));
    } catch (const parse_error& e) {
      throw detail::at_line(lineno, e);
    }
  }
  return out;
}

// One formula per nonblank line, in index order. A line may carry an explicit
// "k:" prefix; it must then match the line's position in the sequence.
inline std::vector<formula> parse_sentence_file(std::istream& is, const language& lang) {
  std::vector<formula> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::string t = detail::trim(line);
    if (t.empty()) continue;
    std::size_t colon = t.find(':');
    if (colon != std::string::npos) {
      std::string head = detail::trim(t.substr(0, colon));
      bool digits = !head.empty() &&
                    head.find_first_not_of("0123456789") == std::string::npos;
      if (!digits)
        throw parse_error("line " + std::to_string(lineno) + ": index prefix '" + head +
                              "' is not a natural number",
                          0);
      if (head != std::to_string(out.size()))
        throw parse_error("line " + std::to_string(lineno) + ": index prefix " + head +
                              " does not match position " + std::to_string(out.size()),
                          0);
      t = detail::trim(t.substr(colon + 1));
    }
    try {
      out.push_back(parse_formula(t, lang));
    } catch (const parse_error& e) {
      throw detail::at_line(lineno, e);
    }
  }
  if (out.empty()) throw config_error("sentence file has no formulas");
  return out;
}

// All valuations with every atom a multiple of 1/resolution, filtered by the
// theory, in ascending lexicographic order (first atom most significant). An
// empty result is a legitimate outcome: the theory has no models on this
// grid. The filter is evaluated in parallel; order comes from enumeration.
inline std::vector<structure_valuation> model_grid(const language& lang,
                                                   const std::vector<formula>& theory,
                                                   std::size_t resolution,
                                                   const run_options& opts = {}) {
  if (resolution < 1) throw config_error("grid resolution must be >= 1");
  const std::size_t per_atom = resolution + 1;
  std::size_t total = 1;
  for (std::size_t i = 0; i < lang.size(); ++i) {
    if (total > (std::size_t(1) << 22) / per_atom)
      throw config_error("grid too large: (resolution+1)^atoms exceeds 2^22 structures");
    total *= per_atom;
  }

  std::vector<structure_valuation> all;
  all.reserve(total);
  std::vector<std::size_t> digits(lang.size(), 0);
  for (std::size_t s = 0; s < total; ++s) {
    std::vector<rational> vals(lang.size());
    for (std::size_t i = 0; i < lang.size(); ++i)
      vals[i] = rational(digits[i], resolution);
    all.push_back(structure_valuation{std::move(vals)});
    for (std::size_t i = lang.size(); i-- > 0;) {
      if (++digits[i] < per_atom) break;
      digits[i] = 0;
    }
  }

  std::vector<char> keep(all.size(), 0);
  parallel_for(all.size(), opts.threads,
               [&](std::size_t s) { keep[s] = satisfies_all(all[s], theory); });
  std::vector<structure_valuation> models;
  for (std::size_t s = 0; s < all.size(); ++s)
    if (keep[s]) models.push_back(std::move(all[s]));
  return models;
}

inline std::string valuation_label(const language& lang, const structure_valuation& s) {
  std::string out;
  for (std::size_t i = 0; i < lang.size(); ++i) {
    if (i) out += ';';
    out += lang.atom(i) + "=" + to_string(s.values[i]);
  }
  return out;
}

struct logic_analysis {
  std::size_t resolution = 0;
  std::size_t model_count = 0;
  bool empty_model_class = false;
  std::optional<pointwise_report> pointwise;
  std::optional<synth_result<rational>> uniform;

  verdict_kind verdict() const {
    // With no models every uniform claim holds vacuously.
    if (empty_model_class) return verdict_kind::certified_at_horizon;
    return uniform->verdict;
  }
};

// Evaluate the sentence sequence on every model of the theory at the given
// grid resolution, then run the pointwise and uniform analyses over the
// model-indexed value family. The sampling prefix must stay inside the
// sentence sequence.
inline logic_analysis analyze_modulo(const language& lang, const std::vector<formula>& theory,
                                     const std::vector<formula>& sentences, const rational& eps,
                                     const sampling_prefix& eta, std::size_t resolution,
                                     const run_options& opts = {}) {
  if (sentences.empty()) throw config_error("sentence sequence is empty");
  if (eta.max_index() >= sentences.size())
    throw config_error("sampling references index " + std::to_string(eta.max_index()) +
                       " beyond the sentence sequence (length " +
                       std::to_string(sentences.size()) + ")");

  logic_analysis res;
  res.resolution = resolution;
  std::vector<structure_valuation> models = model_grid(lang, theory, resolution, opts);
  res.model_count = models.size();
  if (models.empty()) {
    res.empty_model_class = true;
    return res;
  }

  std::vector<std::string> labels;
  labels.reserve(models.size());
  for (const structure_valuation& m : models) labels.push_back(valuation_label(lang, m));

  const std::size_t h = sentences.size();
  std::vector<std::vector<rational>> values(h, std::vector<rational>(models.size()));
  parallel_for(h * models.size(), opts.threads, [&](std::size_t t) {
    values[t / models.size()][t % models.size()] =
        eval_formula(sentences[t / models.size()], models[t % models.size()]);
  });

  function_family_view<rational> view(point_set(std::move(labels)), std::move(values),
                                      "models(r=" + std::to_string(resolution) +
                                          ", count=" + std::to_string(models.size()) + ")");
  res.pointwise = check_pointwise(view, eps, exact_cmp{}, opts);
  res.uniform = uniform_over_points(view, eps, eta, exact_cmp{}, opts);
  return res;
}

} // namespace metastab
