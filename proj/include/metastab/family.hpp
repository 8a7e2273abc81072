#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "metastab/expr.hpp"
#include "metastab/metastability.hpp"
#include "metastab/sampling.hpp"
#include "metastab/sequence.hpp"

namespace metastab {

// A finite indexed sample of a family of sequences. All members share one
// horizon; enumeration order is part of the value and stable across runs.
template <class Num>
class family_sample {
public:
  family_sample(std::vector<basic_sequence<Num>> members, std::string provenance)
      : members_(std::move(members)), provenance_(std::move(provenance)) {
    if (members_.empty()) throw config_error("family must have at least one member");
    for (const auto& m : members_)
      if (m.horizon() != members_.front().horizon())
        throw config_error("family members must share a common horizon (member '" +
                           m.label() + "' differs)");
  }

  std::size_t size() const noexcept { return members_.size(); }
  std::size_t horizon() const noexcept { return members_.front().horizon(); }
  const std::string& provenance() const noexcept { return provenance_; }

  const basic_sequence<Num>& member(std::size_t i) const {
    if (i >= members_.size())
      throw lookup_error("member " + std::to_string(i) + " out of range (family size " +
                         std::to_string(members_.size()) + ")");
    return members_[i];
  }

  std::optional<std::size_t> index_of(const std::string& label) const {
    for (std::size_t i = 0; i < members_.size(); ++i)
      if (members_[i].label() == label) return i;
    return std::nullopt;
  }

  const std::vector<basic_sequence<Num>>& members() const noexcept { return members_; }

private:
  std::vector<basic_sequence<Num>> members_;
  std::string provenance_;
};

// An adversary's move against a claimed uniform bound: one of the family's
// own members plus the sampling prefix that defeats the bound.
struct adversary_move {
  std::size_t member_index;
  sampling_prefix eta;
};

// A generated family plus its optional adversary hook. Adversary outputs
// index into the sample, so they are members of the family by construction.
template <class Num>
struct family_spec {
  family_sample<Num> sample;
  std::function<std::optional<adversary_move>(const Num& eps, std::size_t bound)> adversary;

  bool has_adversary() const { return static_cast<bool>(adversary); }
};

// All 0/1 sequences flipping at most once (both directions), flip index < H.
// Enumeration order: up@0..up@{H-1} (x_i = [i >= t]; up@0 is constant 1),
// const0, then down@1..down@{H-1} (x_i = [i < t]). 2H members, exhaustive.
inline family_spec<rational> gen_monotone01(std::size_t horizon) {
  if (horizon < 1) throw config_error("monotone01 needs horizon >= 1");
  std::vector<exact_sequence> members;
  members.reserve(2 * horizon);
  auto step = [&](std::size_t t, bool up, const std::string& name) {
    std::vector<rational> v(horizon);
    for (std::size_t i = 0; i < horizon; ++i)
      v[i] = rational((i >= t) == up ? 1 : 0);
    members.emplace_back(std::move(v), source_kind::closed_form, name);
  };
  for (std::size_t t = 0; t < horizon; ++t) step(t, true, "up@" + std::to_string(t));
  members.emplace_back(std::vector<rational>(horizon, rational(0)), source_kind::closed_form,
                       "const0");
  for (std::size_t t = 1; t < horizon; ++t) step(t, false, "down@" + std::to_string(t));
  return {family_sample<rational>(std::move(members),
                                  "monotone01(H=" + std::to_string(horizon) + ")"),
          nullptr};
}

// Eventually-zero family with no uniform rate: alternating 0,1,... prefixes
// of every even length p <= P, then 0 forever. Each member converges (to 0),
// but the adversary answers any claimed constant bound B with the member
// p = 2B+2 and the pair sampling eta_m = {m, m+1} (length B), whose first B
// levels all oscillate by 1. It declines when 2B+2 > P or the 0/1 values
// cannot reach eps (eps > 1).
inline family_spec<rational> gen_eventually_zero_alternating(std::size_t max_prefix,
                                                             std::size_t horizon) {
  if (max_prefix >= horizon) throw config_error("alternating family needs P < H");
  std::size_t p_max = max_prefix - max_prefix % 2;
  std::vector<exact_sequence> members;
  members.reserve(p_max / 2 + 1);
  for (std::size_t p = 0; p <= p_max; p += 2) {
    std::vector<rational> v(horizon, rational(0));
    for (std::size_t i = 0; i < p; ++i) v[i] = rational(i % 2);
    members.emplace_back(std::move(v), source_kind::closed_form, "alt@" + std::to_string(p));
  }
  family_sample<rational> sample(std::move(members),
                                 "eventually-zero-alternating(P=" + std::to_string(p_max) +
                                     ", H=" + std::to_string(horizon) + ")");
  auto adversary = [p_max, horizon](const rational& eps,
                                    std::size_t bound) -> std::optional<adversary_move> {
    if (eps > 1) return std::nullopt;  // 0/1 oscillations never reach eps
    std::size_t p = 2 * bound + 2;
    if (p > p_max || p >= horizon) return std::nullopt;
    return adversary_move{p / 2, pairs_sampling(bound == 0 ? 1 : bound)};
  };
  return {std::move(sample), adversary};
}

// Running averages a_n = (x_0 + ... + x_n)/(n+1) of an expression-defined
// base, exact arithmetic. Single-member family.
inline family_spec<rational> gen_cesaro(const expr& base, std::size_t horizon,
                                        const std::string& base_text = "") {
  if (horizon < 1) throw config_error("cesaro needs horizon >= 1");
  std::vector<rational> v(horizon);
  rational sum(0);
  for (std::size_t n = 0; n < horizon; ++n) {
    sum += eval_sequence_expr(base, n);
    v[n] = sum / rational(n + 1);
  }
  std::vector<exact_sequence> members;
  members.emplace_back(std::move(v), source_kind::expression, "cesaro");
  return {family_sample<rational>(std::move(members),
                                  "cesaro(H=" + std::to_string(horizon) + ", base=" +
                                      (base_text.empty() ? print_expr(base) : base_text) + ")"),
          nullptr};
}

// One member per expression, evaluated exactly on [0, H).
inline family_spec<rational> gen_from_exprs(const std::vector<expr>& exprs,
                                            std::size_t horizon) {
  if (horizon < 1) throw config_error("expression family needs horizon >= 1");
  if (exprs.empty()) throw config_error("expression family needs at least one expression");
  std::vector<exact_sequence> members;
  members.reserve(exprs.size());
  for (std::size_t k = 0; k < exprs.size(); ++k) {
    std::vector<rational> v(horizon);
    for (std::size_t n = 0; n < horizon; ++n) v[n] = eval_sequence_expr(exprs[k], n);
    members.emplace_back(std::move(v), source_kind::expression,
                         "expr@" + std::to_string(k));
  }
  return {family_sample<rational>(std::move(members),
                                  "exprs(H=" + std::to_string(horizon) + ", count=" +
                                      std::to_string(exprs.size()) + ")"),
          nullptr};
}

} // namespace metastab
