#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "metastab/numeric.hpp"
#include "metastab/sampling.hpp"
#include "metastab/sequence.hpp"

namespace metastab {

// Three-valued outcome of any horizon-bounded analysis. Refutations of
// claimed bounds are sound absolutely; certifications are sound only relative
// to the tested horizon / sampling prefix, and reports say so.
enum class verdict_kind { certified_at_horizon, refuted, inconclusive };

inline const char* to_string(verdict_kind v) {
  switch (v) {
    case verdict_kind::certified_at_horizon: return "certified-at-horizon";
    case verdict_kind::refuted: return "refuted";
    case verdict_kind::inconclusive: return "inconclusive";
  }
  return "?";
}

// A level m whose sample has oscillation < epsilon.
template <class Num>
struct witness {
  std::size_t level = 0;
  Num oscillation{};
};

// Max pairwise |x_i - x_j| over the set; for the absolute-difference metric
// on the reals this is spread = max - min. 0 when fewer than two indices.
template <class Num>
Num oscillation(const basic_sequence<Num>& x, const index_set& s) {
  if (s.size() < 2) {
    if (s.size() == 1) (void)x.at(s.min());  // still horizon-checked
    return Num(0);
  }
  bool first = true;
  Num lo{}, hi{};
  for (std::size_t i : s) {
    const Num& v = x.at(i);
    if (first) {
      lo = hi = v;
      first = false;
    } else {
      if (v < lo) lo = v;
      if (hi < v) hi = v;
    }
  }
  return Num(hi - lo);
}

// Least m < length(eta) whose sampled oscillation is strictly below epsilon,
// or nullopt when no level of this prefix qualifies. Empty and singleton
// levels have oscillation 0 and are vacuous witnesses.
template <class Num, class Cmp = default_cmp_t<Num>>
std::optional<witness<Num>> find_witness(const basic_sequence<Num>& x, const Num& eps,
                                         const sampling_prefix& eta, Cmp cmp = {}) {
  for (std::size_t m = 0; m < eta.length(); ++m) {
    Num osc = oscillation(x, eta.level(m));
    if (cmp.less(osc, eps)) return witness<Num>{m, std::move(osc)};
  }
  return std::nullopt;
}

namespace detail {

// suffix_spread[i] = (max, min) of x over [i, H).
template <class Num>
std::vector<std::pair<Num, Num>> suffix_extremes(const basic_sequence<Num>& x) {
  const std::size_t h = x.horizon();
  std::vector<std::pair<Num, Num>> s(h);
  s[h - 1] = {x.at(h - 1), x.at(h - 1)};
  for (std::size_t i = h - 1; i-- > 0;) {
    const Num& v = x.at(i);
    s[i] = s[i + 1];
    if (s[i].first < v) s[i].first = v;
    if (v < s[i].second) s[i].second = v;
  }
  return s;
}

} // namespace detail

// Least N with all i, j in [N, H) pairwise within epsilon (strict). Always
// defined: the singleton tail at N = H-1 has spread 0. This is a
// horizon-limited approximation of the true Cauchy modulus; callers can tell
// the vacuous case apart via cauchy_informative().
template <class Num, class Cmp = default_cmp_t<Num>>
std::size_t cauchy_index(const basic_sequence<Num>& x, const Num& eps, Cmp cmp = {}) {
  if (!(Num(0) < eps)) throw config_error("epsilon must be > 0");
  auto suffix = detail::suffix_extremes(x);
  for (std::size_t n = 0; n < x.horizon(); ++n) {
    if (cmp.less(Num(suffix[n].first - suffix[n].second), eps)) return n;
  }
  // Only reachable on the float64 lane when eps <= tolerance; the singleton
  // tail keeps the contract value <= H-1 meaningful either way.
  return x.horizon() - 1;
}

// The bound N = cauchy_index is informative when the tail [N, H) holds at
// least two terms; N = H-1 only says the horizon ran out.
template <class Num>
bool cauchy_informative(const basic_sequence<Num>& x, std::size_t n) {
  return n + 2 <= x.horizon();
}

// Constructive content of the metastable => Cauchy direction: for a sequence
// that keeps oscillating, build a prefix eta with eta_m = {i_m, j_m},
// m <= i_m < j_m < H and |x_{i_m} - x_{j_m}| >= eps for every m < L. Whenever
// this returns a prefix, find_witness(x, eps, eta) is none by construction.
// Per level the lexicographically least qualifying pair is chosen, which on
// an alternating 0/1 sequence reproduces eta_m = {m, m+1}.
template <class Num, class Cmp = default_cmp_t<Num>>
std::optional<sampling_prefix> refuting_sampling(const basic_sequence<Num>& x, const Num& eps,
                                                 std::size_t length, Cmp cmp = {}) {
  if (length == 0) throw config_error("refuting sampling needs length >= 1");
  const std::size_t h = x.horizon();
  auto suffix = detail::suffix_extremes(x);
  std::vector<index_set> levels;
  levels.reserve(length);
  for (std::size_t m = 0; m < length; ++m) {
    std::optional<std::pair<std::size_t, std::size_t>> pair;
    for (std::size_t i = m; i + 1 < h && !pair; ++i) {
      // Skip i unless some j > i can reach eps at all.
      const Num& xi = x.at(i);
      Num up(suffix[i + 1].first - xi);
      Num down(xi - suffix[i + 1].second);
      if (cmp.less(up < down ? down : up, eps)) continue;
      for (std::size_t j = i + 1; j < h; ++j) {
        if (!cmp.less(num_abs(Num(x.at(j) - xi)), eps)) {
          pair = {i, j};
          break;
        }
      }
    }
    if (!pair) return std::nullopt;
    levels.push_back(index_set{pair->first, pair->second});
  }
  return sampling_prefix(std::move(levels));
}

} // namespace metastab
