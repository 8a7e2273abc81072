#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "metastab/family.hpp"
#include "metastab/metastability.hpp"
#include "metastab/parallel.hpp"
#include "metastab/rate.hpp"

namespace metastab {

// Version stamp written into every certificate / refutation artifact.
inline constexpr int artifact_schema_version = 1;

// Per-(epsilon, sampling, member) outcome. `failed` is definite: every level
// below the bound was fully evaluated and none witnessed. `inconclusive`
// means the check ran out of data first (sampling prefix shorter than the
// bound, or a level reaching past the horizon).
enum class triple_status { witnessed, failed, inconclusive };

inline const char* to_string(triple_status s) {
  switch (s) {
    case triple_status::witnessed: return "witnessed";
    case triple_status::failed: return "failed";
    case triple_status::inconclusive: return "inconclusive";
  }
  return "?";
}

template <class Num>
struct witness_entry {
  std::size_t eps_index = 0;
  std::size_t sampling_index = 0;
  std::size_t member_index = 0;
  std::size_t bound = 0;  // levels checked: the rate's value, or the scanned length for synthesis
  triple_status status = triple_status::inconclusive;
  std::optional<std::size_t> level;  // least witnessing level, when witnessed
  std::optional<Num> oscillation;    // its oscillation (< epsilon)
  std::string reason;                // set when inconclusive
};

namespace detail {

template <class Num>
struct level_scan {
  std::optional<witness<Num>> found;
  bool truncated = false;  // skipped at least one level reaching past the horizon
};

// Least witness among levels m < min(limit, length), skipping (and flagging)
// levels that reference indices beyond the horizon.
template <class Num, class Cmp>
level_scan<Num> scan_levels(const basic_sequence<Num>& x, const Num& eps,
                            const sampling_prefix& eta, std::size_t limit, const Cmp& cmp) {
  level_scan<Num> out;
  const std::size_t stop = std::min(limit, eta.length());
  for (std::size_t m = 0; m < stop; ++m) {
    const index_set& lvl = eta.level(m);
    if (!lvl.empty() && lvl.max() >= x.horizon()) {
      out.truncated = true;
      continue;
    }
    Num osc = oscillation(x, lvl);
    if (cmp.less(osc, eps)) {
      out.found = witness<Num>{m, std::move(osc)};
      return out;
    }
  }
  return out;
}

} // namespace detail

template <class Num>
struct uniform_certificate {
  verdict_kind verdict = verdict_kind::inconclusive;
  std::size_t horizon = 0;
  std::string family;  // provenance of the sample
  std::vector<rational> epsilons;
  std::vector<sampling_prefix> samplings;
  nlohmann::ordered_json rate;              // serialized rate bound
  std::vector<witness_entry<Num>> entries;  // canonical order: member-major, then eps, sampling
  std::optional<std::size_t> first_failure;       // index into entries
  std::optional<std::size_t> first_inconclusive;  // index into entries
};

// Check a proposed uniform rate: every (member, epsilon, sampling) triple
// must have a witnessing level m strictly below the rate's bound for that
// (epsilon, sampling). All triples are evaluated with no early exit and the
// first failure is reported against the fixed member-major order, so the
// result is identical no matter how work is scheduled. One definite failure
// refutes the rate even if other triples are inconclusive.
template <class Num, class Cmp = default_cmp_t<Num>>
uniform_certificate<Num> certify_uniform(const family_sample<Num>& fam,
                                         const std::vector<rational>& epsilons,
                                         const std::vector<sampling_prefix>& samplings,
                                         const rate_bound& rate, const Cmp& cmp = {},
                                         const run_options& opts = {}) {
  if (epsilons.empty()) throw config_error("need at least one epsilon");
  for (const rational& e : epsilons)
    if (!(e > 0)) throw config_error("epsilon must be > 0, got " + to_string(e));
  if (samplings.empty()) throw config_error("need at least one sampling");

  uniform_certificate<Num> cert;
  cert.horizon = fam.horizon();
  cert.family = fam.provenance();
  cert.epsilons = epsilons;
  cert.samplings = samplings;
  cert.rate = rate.to_json();

  const std::size_t ne = epsilons.size(), ns = samplings.size();
  cert.entries.resize(fam.size() * ne * ns);
  parallel_for(cert.entries.size(), opts.threads, [&](std::size_t t) {
    witness_entry<Num>& out = cert.entries[t];
    out.member_index = t / (ne * ns);
    out.eps_index = (t / ns) % ne;
    out.sampling_index = t % ns;
    const sampling_prefix& eta = samplings[out.sampling_index];
    out.bound = rate.eval({out.eps_index, epsilons[out.eps_index], out.sampling_index, eta});
    const Num eps = num_from_rational<Num>(epsilons[out.eps_index]);
    auto scan = detail::scan_levels(fam.member(out.member_index), eps, eta, out.bound, cmp);
    if (scan.found) {
      out.status = triple_status::witnessed;
      out.level = scan.found->level;
      out.oscillation = std::move(scan.found->oscillation);
    } else if (scan.truncated || out.bound > eta.length()) {
      out.status = triple_status::inconclusive;
      out.reason = scan.truncated ? "out-of-horizon" : "bound-exceeds-sampling-length";
    } else {
      out.status = triple_status::failed;
    }
  });

  for (std::size_t t = 0; t < cert.entries.size(); ++t) {
    if (cert.entries[t].status == triple_status::failed && !cert.first_failure)
      cert.first_failure = t;
    if (cert.entries[t].status == triple_status::inconclusive && !cert.first_inconclusive)
      cert.first_inconclusive = t;
  }
  cert.verdict = cert.first_failure        ? verdict_kind::refuted
                 : cert.first_inconclusive ? verdict_kind::inconclusive
                                           : verdict_kind::certified_at_horizon;
  return cert;
}

template <class Num>
struct synth_result {
  verdict_kind verdict = verdict_kind::inconclusive;
  std::optional<std::size_t> rate;  // least certifiable constant bound; set iff certified
  std::size_t horizon = 0;
  std::string family;
  std::vector<rational> epsilons;
  std::vector<sampling_prefix> samplings;
  std::vector<witness_entry<Num>> entries;
  std::optional<std::size_t> first_failure;
  std::optional<std::size_t> first_inconclusive;
};

// Synthesize the least constant bound certify_uniform would accept: one more
// than the largest least-witness level over all triples. When some triple has
// no witness anywhere in its fully evaluated prefix, no constant bound can
// certify and the claim that one exists is refuted; when the only
// obstructions run past the horizon, the result is inconclusive.
template <class Num, class Cmp = default_cmp_t<Num>>
synth_result<Num> synth_minimal_uniform_rate(const family_sample<Num>& fam,
                                             const std::vector<rational>& epsilons,
                                             const std::vector<sampling_prefix>& samplings,
                                             const Cmp& cmp = {}, const run_options& opts = {}) {
  if (epsilons.empty()) throw config_error("need at least one epsilon");
  for (const rational& e : epsilons)
    if (!(e > 0)) throw config_error("epsilon must be > 0, got " + to_string(e));
  if (samplings.empty()) throw config_error("need at least one sampling");

  synth_result<Num> res;
  res.horizon = fam.horizon();
  res.family = fam.provenance();
  res.epsilons = epsilons;
  res.samplings = samplings;

  const std::size_t ne = epsilons.size(), ns = samplings.size();
  res.entries.resize(fam.size() * ne * ns);
  parallel_for(res.entries.size(), opts.threads, [&](std::size_t t) {
    witness_entry<Num>& out = res.entries[t];
    out.member_index = t / (ne * ns);
    out.eps_index = (t / ns) % ne;
    out.sampling_index = t % ns;
    const sampling_prefix& eta = samplings[out.sampling_index];
    out.bound = eta.length();
    const Num eps = num_from_rational<Num>(epsilons[out.eps_index]);
    auto scan = detail::scan_levels(fam.member(out.member_index), eps, eta, eta.length(), cmp);
    if (scan.found) {
      out.status = triple_status::witnessed;
      out.level = scan.found->level;
      out.oscillation = std::move(scan.found->oscillation);
    } else if (scan.truncated) {
      out.status = triple_status::inconclusive;
      out.reason = "out-of-horizon";
    } else {
      out.status = triple_status::failed;
    }
  });

  std::size_t max_level = 0;
  for (std::size_t t = 0; t < res.entries.size(); ++t) {
    const witness_entry<Num>& w = res.entries[t];
    if (w.status == triple_status::failed && !res.first_failure) res.first_failure = t;
    if (w.status == triple_status::inconclusive && !res.first_inconclusive)
      res.first_inconclusive = t;
    if (w.status == triple_status::witnessed) max_level = std::max(max_level, *w.level);
  }
  if (res.first_failure) {
    res.verdict = verdict_kind::refuted;
  } else if (res.first_inconclusive) {
    res.verdict = verdict_kind::inconclusive;
  } else {
    res.verdict = verdict_kind::certified_at_horizon;
    res.rate = max_level + 1;
  }
  return res;
}

// A concrete defeat of the claim "bound is a uniform rate for epsilon": one
// member and one sampling prefix none of whose first `bound` levels witness.
template <class Num>
struct refutation {
  rational epsilon;
  std::size_t bound;
  std::size_t horizon;
  std::string family;
  std::size_t member_index;
  std::string member;             // label
  sampling_prefix eta;            // length >= bound
  std::vector<Num> oscillations;  // per level m < bound; none passes the witness test
};

namespace detail {

// The replayable core of a refutation: every level m < bound stays within the
// horizon and its oscillation fails the witness test. Returns the oscillation
// evidence, or nullopt when the claim does not hold.
template <class Num, class Cmp>
std::optional<std::vector<Num>> refuting_evidence(const basic_sequence<Num>& x, const Num& eps,
                                                  const sampling_prefix& eta, std::size_t bound,
                                                  const Cmp& cmp) {
  if (bound < 1 || eta.length() < bound) return std::nullopt;
  std::vector<Num> oscs;
  oscs.reserve(bound);
  for (std::size_t m = 0; m < bound; ++m) {
    const index_set& lvl = eta.level(m);
    if (!lvl.empty() && lvl.max() >= x.horizon()) return std::nullopt;
    Num osc = oscillation(x, lvl);
    if (cmp.less(osc, eps)) return std::nullopt;
    oscs.push_back(std::move(osc));
  }
  return oscs;
}

} // namespace detail

enum class refute_strategy { adversary, exhaustive };

inline const char* to_string(refute_strategy s) {
  return s == refute_strategy::adversary ? "adversary" : "exhaustive";
}

// Try to defeat a claimed uniform bound. The adversary strategy asks the
// family's own hook and hard-fails (internal_error) if the hook returns a
// move that does not replay; the exhaustive strategy searches every member
// for a constructible refuting prefix of length `bound` and reports the
// least member index that has one. nullopt means the strategy found nothing,
// not that no refutation exists.
template <class Num, class Cmp = default_cmp_t<Num>>
std::optional<refutation<Num>> refute_uniform_bound(const family_spec<Num>& fam,
                                                    const rational& eps_exact, std::size_t bound,
                                                    refute_strategy strategy, const Cmp& cmp = {},
                                                    const run_options& opts = {}) {
  if (bound < 1) throw config_error("claimed bound must be >= 1");
  if (!(eps_exact > 0)) throw config_error("epsilon must be > 0, got " + to_string(eps_exact));
  const Num eps = num_from_rational<Num>(eps_exact);
  const family_sample<Num>& sample = fam.sample;

  if (strategy == refute_strategy::adversary) {
    if (!fam.has_adversary())
      throw config_error("family has no adversary; use the exhaustive strategy");
    std::optional<adversary_move> mv = fam.adversary(eps, bound);
    if (!mv) return std::nullopt;
    const basic_sequence<Num>& x = sample.member(mv->member_index);
    auto oscs = detail::refuting_evidence(x, eps, mv->eta, bound, cmp);
    if (!oscs)
      throw internal_error("adversary returned a move that does not refute (member " +
                           std::to_string(mv->member_index) + ")");
    return refutation<Num>{eps_exact,        bound,     sample.horizon(),
                           sample.provenance(), mv->member_index, x.label(),
                           std::move(mv->eta), std::move(*oscs)};
  }

  std::vector<std::optional<sampling_prefix>> found(sample.size());
  parallel_for(sample.size(), opts.threads, [&](std::size_t p) {
    found[p] = refuting_sampling(sample.member(p), eps, bound, cmp);
  });
  for (std::size_t p = 0; p < sample.size(); ++p) {
    if (!found[p]) continue;
    const basic_sequence<Num>& x = sample.member(p);
    auto oscs = detail::refuting_evidence(x, eps, *found[p], bound, cmp);
    if (!oscs) throw internal_error("constructed refuting prefix failed replay");
    return refutation<Num>{eps_exact,        bound, sample.horizon(), sample.provenance(),
                           p,                x.label(), std::move(*found[p]), std::move(*oscs)};
  }
  return std::nullopt;
}

// Re-check a refutation against a family sample (e.g. one loaded from disk).
// True iff the named member exists and every level m < bound fails the
// witness test within the horizon. Oscillation evidence carried by the
// refutation is recomputed, never trusted.
template <class Num, class Cmp = default_cmp_t<Num>>
bool replay_refutation(const family_sample<Num>& fam, const refutation<Num>& r,
                       const Cmp& cmp = {}) {
  if (r.member_index >= fam.size() || r.bound < 1) return false;
  return detail::refuting_evidence(fam.member(r.member_index),
                                   num_from_rational<Num>(r.epsilon), r.eta, r.bound, cmp)
      .has_value();
}

// Expand a certificate's first failing triple into a standalone, replayable
// refutation of the checked rate. Only defined for definite failures: there
// the bound fits the sampling prefix, every level below it was evaluated,
// and none witnessed, which is exactly the refutation contract.
template <class Num, class Cmp = default_cmp_t<Num>>
std::optional<refutation<Num>> first_failure_refutation(const uniform_certificate<Num>& cert,
                                                        const family_sample<Num>& fam,
                                                        const Cmp& cmp = {}) {
  if (!cert.first_failure) return std::nullopt;
  const witness_entry<Num>& w = cert.entries[*cert.first_failure];
  const sampling_prefix& eta = cert.samplings[w.sampling_index];
  const rational& eps = cert.epsilons[w.eps_index];
  auto oscs = detail::refuting_evidence(fam.member(w.member_index), num_from_rational<Num>(eps),
                                        eta, w.bound, cmp);
  if (!oscs) throw internal_error("failed certificate triple did not replay as a refutation");
  return refutation<Num>{eps,
                         w.bound,
                         fam.horizon(),
                         fam.provenance(),
                         w.member_index,
                         fam.member(w.member_index).label(),
                         eta,
                         std::move(*oscs)};
}

template <class Num>
nlohmann::ordered_json witness_entries_json(const std::vector<witness_entry<Num>>& entries) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const witness_entry<Num>& w : entries) {
    nlohmann::ordered_json e;
    e["member_index"] = w.member_index;
    e["eps_index"] = w.eps_index;
    e["sampling_index"] = w.sampling_index;
    e["bound"] = w.bound;
    e["status"] = to_string(w.status);
    if (w.level) e["level"] = *w.level;
    if (w.oscillation) e["oscillation"] = num_io<Num>::to_json(*w.oscillation);
    if (!w.reason.empty()) e["reason"] = w.reason;
    arr.push_back(std::move(e));
  }
  return arr;
}

template <class Num>
nlohmann::ordered_json to_json(const uniform_certificate<Num>& c) {
  nlohmann::ordered_json j;
  j["schema_version"] = artifact_schema_version;
  j["kind"] = "uniform-certificate";
  j["lane"] = num_io<Num>::lane;
  j["verdict"] = to_string(c.verdict);
  j["family"] = c.family;
  j["horizon"] = c.horizon;
  nlohmann::ordered_json eps = nlohmann::ordered_json::array();
  for (const rational& e : c.epsilons) eps.push_back(to_string(e));
  j["epsilons"] = std::move(eps);
  nlohmann::ordered_json sam = nlohmann::ordered_json::array();
  for (const sampling_prefix& s : c.samplings) sam.push_back(s.to_json());
  j["samplings"] = std::move(sam);
  j["rate"] = c.rate;
  j["witnesses"] = witness_entries_json(c.entries);
  if (c.first_failure) j["first_failure"] = *c.first_failure;
  if (c.first_inconclusive) j["first_inconclusive"] = *c.first_inconclusive;
  return j;
}

template <class Num>
nlohmann::ordered_json to_json(const synth_result<Num>& r) {
  nlohmann::ordered_json j;
  j["schema_version"] = artifact_schema_version;
  j["kind"] = "rate-synthesis";
  j["lane"] = num_io<Num>::lane;
  j["verdict"] = to_string(r.verdict);
  j["family"] = r.family;
  j["horizon"] = r.horizon;
  nlohmann::ordered_json eps = nlohmann::ordered_json::array();
  for (const rational& e : r.epsilons) eps.push_back(to_string(e));
  j["epsilons"] = std::move(eps);
  nlohmann::ordered_json sam = nlohmann::ordered_json::array();
  for (const sampling_prefix& s : r.samplings) sam.push_back(s.to_json());
  j["samplings"] = std::move(sam);
  if (r.rate)
    j["rate"] = *r.rate;
  else
    j["rate"] = nullptr;
  j["witnesses"] = witness_entries_json(r.entries);
  if (r.first_failure) j["first_failure"] = *r.first_failure;
  if (r.first_inconclusive) j["first_inconclusive"] = *r.first_inconclusive;
  return j;
}

template <class Num>
nlohmann::ordered_json to_json(const refutation<Num>& r) {
  nlohmann::ordered_json j;
  j["schema_version"] = artifact_schema_version;
  j["kind"] = "refutation";
  j["lane"] = num_io<Num>::lane;
  j["epsilon"] = to_string(r.epsilon);
  j["bound"] = r.bound;
  j["family"] = r.family;
  j["horizon"] = r.horizon;
  j["member_index"] = r.member_index;
  j["member"] = r.member;
  j["sampling"] = r.eta.to_json();
  nlohmann::ordered_json oscs = nlohmann::ordered_json::array();
  for (const Num& o : r.oscillations) oscs.push_back(num_io<Num>::to_json(o));
  j["oscillations"] = std::move(oscs);
  return j;
}

template <class Num>
refutation<Num> refutation_from_json(const nlohmann::json& j) {
  try {
    if (!j.is_object() || j.value("kind", "") != std::string("refutation"))
      throw config_error("refutation file: expected object with kind \"refutation\"");
    if (j.value("schema_version", -1) != artifact_schema_version)
      throw config_error("refutation file: unsupported schema_version");
    if (j.value("lane", "") != std::string(num_io<Num>::lane))
      throw config_error(std::string("refutation file: lane mismatch, expected ") +
                         num_io<Num>::lane);
    auto need = [&](const char* k) -> const nlohmann::json& {
      if (!j.contains(k))
        throw config_error(std::string("refutation file: missing field \"") + k + "\"");
      return j.at(k);
    };
    refutation<Num> r{parse_rational(need("epsilon").template get<std::string>()),
                      need("bound").template get<std::size_t>(),
                      need("horizon").template get<std::size_t>(),
                      need("family").template get<std::string>(),
                      need("member_index").template get<std::size_t>(),
                      need("member").template get<std::string>(),
                      sampling_prefix::from_json(need("sampling")),
                      {}};
    for (const auto& o : need("oscillations")) r.oscillations.push_back(num_io<Num>::from_json(o));
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("refutation file: malformed field: ") + e.what());
  }
}

} // namespace metastab
