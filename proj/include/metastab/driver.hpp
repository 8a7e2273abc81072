#pragma once

#include <charconv>
#include <chrono>
#include <cstddef>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "metastab/certify.hpp"
#include "metastab/expr.hpp"
#include "metastab/family.hpp"
#include "metastab/funcspace.hpp"
#include "metastab/logic.hpp"
#include "metastab/metastability.hpp"
#include "metastab/rate.hpp"
#include "metastab/sampling.hpp"
#include "metastab/trace.hpp"

namespace metastab {

inline constexpr int report_schema_version = 1;
inline constexpr const char* tool_name = "metastab";

// Knobs that must not influence report content: parallelism never changes any
// result byte, and timing is presentation-only (drop it to compare reports).
struct run_context {
  unsigned threads = 1;
  bool timing = true;
  double tolerance = 1e-9;  // float64-lane comparison tolerance
};

struct driver_result {
  int exit_code = 0;
  nlohmann::ordered_json report;
};

namespace detail {

inline int exit_for(verdict_kind v) {
  switch (v) {
    case verdict_kind::certified_at_horizon: return 0;
    case verdict_kind::refuted: return 1;
    case verdict_kind::inconclusive: return 2;
  }
  return 4;
}

inline verdict_kind worst(verdict_kind a, verdict_kind b) {
  if (a == verdict_kind::refuted || b == verdict_kind::refuted) return verdict_kind::refuted;
  if (a == verdict_kind::inconclusive || b == verdict_kind::inconclusive)
    return verdict_kind::inconclusive;
  return verdict_kind::certified_at_horizon;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    std::size_t at = s.find(sep, start);
    if (at == std::string::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, at - start));
    start = at + 1;
  }
}

inline std::size_t parse_nat(const std::string& s, const std::string& what) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
    throw config_error(what + ": expected a natural number, got '" + s + "'");
  return v;
}

inline std::string slurp(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw config_error("cannot open file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

inline std::vector<rational> parse_epsilons(const std::vector<std::string>& texts) {
  if (texts.empty()) throw config_error("--epsilon: at least one value is required");
  std::vector<rational> out;
  out.reserve(texts.size());
  for (const std::string& t : texts) {
    rational e = parse_rational(t);
    if (!(e > 0)) throw config_error("--epsilon: must be > 0, got '" + t + "'");
    out.push_back(std::move(e));
  }
  return out;
}

class stopwatch {
public:
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0_)
        .count();
  }

private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

inline nlohmann::ordered_json make_report(const std::string& command, const char* lane,
                                          nlohmann::ordered_json config,
                                          nlohmann::ordered_json result,
                                          std::optional<double> timing_ms) {
  nlohmann::ordered_json j;
  j["schema_version"] = report_schema_version;
  j["tool"] = tool_name;
  j["command"] = command;
  if (lane) j["lane"] = lane;
  j["config"] = std::move(config);
  j["result"] = std::move(result);
  if (timing_ms) {
    nlohmann::ordered_json t;
    t["total_ms"] = *timing_ms;
    j["timing"] = std::move(t);
  }
  return j;
}

} // namespace detail

// --sampling source: pairs:L | interval:W:L | straddle:C[:L] | @file.json
inline sampling_prefix parse_sampling_source(const std::string& src) {
  if (src.empty()) throw config_error("--sampling: empty source");
  if (src[0] == '@') {
    std::string path = src.substr(1);
    std::ifstream f(path);
    if (!f) throw config_error("--sampling: cannot open file '" + path + "'");
    try {
      return load_sampling(f);
    } catch (const config_error& e) {
      throw config_error("--sampling: '" + path + "': " + e.what());
    }
  }
  auto parts = detail::split(src, ':');
  const std::string& name = parts[0];
  if (name == "pairs" && parts.size() == 2)
    return pairs_sampling(detail::parse_nat(parts[1], "--sampling pairs length"));
  if (name == "interval" && parts.size() == 3)
    return interval_sampling(detail::parse_nat(parts[1], "--sampling interval width"),
                             detail::parse_nat(parts[2], "--sampling interval length"));
  if (name == "straddle" && (parts.size() == 2 || parts.size() == 3))
    return straddle_sampling(detail::parse_nat(parts[1], "--sampling straddle center"),
                             parts.size() == 3
                                 ? detail::parse_nat(parts[2], "--sampling straddle length")
                                 : 0);
  throw config_error("--sampling: unrecognized source '" + src +
                     "' (expected pairs:L, interval:W:L, straddle:C[:L], or @file.json)");
}

// --rate source: const:N | maxeta0plus1 | expr:TEXT | @file.json
inline rate_bound parse_rate_source(const std::string& src) {
  if (src.empty()) throw config_error("--rate: empty source");
  if (src[0] == '@') {
    std::string path = src.substr(1);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(detail::slurp(path));
    } catch (const nlohmann::json::exception& e) {
      throw config_error("--rate: '" + path + "': invalid JSON: " + e.what());
    }
    try {
      return rate_bound::from_json(j);
    } catch (const config_error& e) {
      throw config_error("--rate: '" + path + "': " + e.what());
    }
  }
  if (src == "maxeta0plus1") return rate_bound::max_eta0_plus_1();
  std::size_t colon = src.find(':');
  if (colon != std::string::npos) {
    std::string kind = src.substr(0, colon), rest = src.substr(colon + 1);
    if (kind == "const")
      return rate_bound::constant(detail::parse_nat(rest, "--rate const value"));
    if (kind == "expr") {
      try {
        return rate_bound::expression(rest);
      } catch (const parse_error& e) {
        throw config_error("--rate expression: " + std::string(e.what()));
      }
    }
  }
  throw config_error("--rate: unrecognized source '" + src +
                     "' (expected const:N, maxeta0plus1, expr:TEXT, or @file.json)");
}

// --family source: monotone01:H | alternating:P:H | cesaro:H:EXPR |
// expr:H:EXPR[;EXPR...] | @file.csv (trace, float64 lane)
struct loaded_family {
  std::string source;
  bool exact = true;
  std::optional<family_spec<rational>> exact_family;
  std::optional<family_spec<double>> trace_family;

  std::size_t horizon() const {
    return exact ? exact_family->sample.horizon() : trace_family->sample.horizon();
  }
  const std::string& provenance() const {
    return exact ? exact_family->sample.provenance() : trace_family->sample.provenance();
  }
  std::size_t size() const {
    return exact ? exact_family->sample.size() : trace_family->sample.size();
  }
};

inline loaded_family load_family_source(const std::string& src) {
  loaded_family out;
  out.source = src;
  if (src.empty()) throw config_error("--family: empty source");
  if (src[0] == '@') {
    std::string path = src.substr(1);
    std::ifstream f(path);
    if (!f) throw config_error("--family: cannot open file '" + path + "'");
    out.exact = false;
    out.trace_family = ingest_trace(f, path);
    return out;
  }
  std::size_t c1 = src.find(':');
  std::string name = src.substr(0, c1 == std::string::npos ? src.size() : c1);
  auto rest_after = [&](std::size_t colon) { return src.substr(colon + 1); };
  try {
    if (name == "monotone01" && c1 != std::string::npos) {
      out.exact_family =
          gen_monotone01(detail::parse_nat(rest_after(c1), "--family monotone01 horizon"));
      return out;
    }
    if (name == "alternating" && c1 != std::string::npos) {
      auto parts = detail::split(rest_after(c1), ':');
      if (parts.size() == 2) {
        out.exact_family = gen_eventually_zero_alternating(
            detail::parse_nat(parts[0], "--family alternating max prefix"),
            detail::parse_nat(parts[1], "--family alternating horizon"));
        return out;
      }
    }
    if ((name == "cesaro" || name == "expr") && c1 != std::string::npos) {
      std::size_t c2 = src.find(':', c1 + 1);
      if (c2 != std::string::npos) {
        std::size_t h = detail::parse_nat(src.substr(c1 + 1, c2 - c1 - 1),
                                          "--family " + name + " horizon");
        std::string body = rest_after(c2);
        if (name == "cesaro") {
          out.exact_family = gen_cesaro(parse_sequence_expr(body), h, body);
        } else {
          std::vector<expr> exprs;
          for (const std::string& t : detail::split(body, ';'))
            exprs.push_back(parse_sequence_expr(t));
          out.exact_family = gen_from_exprs(exprs, h);
        }
        return out;
      }
    }
  } catch (const parse_error& e) {
    throw config_error("--family: " + std::string(e.what()));
  }
  throw config_error("--family: unrecognized source '" + src +
                     "' (expected monotone01:H, alternating:P:H, cesaro:H:EXPR, "
                     "expr:H:EXPR[;EXPR...], or @file.csv)");
}

namespace detail {

// Certify/synth preconditions pin every sampling inside the family horizon;
// shorter-than-bound prefixes stay a per-triple inconclusive, but an index
// past the horizon is a configuration error, named precisely.
inline void require_within_horizon(const std::vector<sampling_prefix>& etas,
                                   std::size_t horizon) {
  for (std::size_t s = 0; s < etas.size(); ++s) {
    if (!(etas[s].max_index() < horizon))
      throw config_error("--sampling: sampling " + std::to_string(s) + " references index " +
                         std::to_string(etas[s].max_index()) + ", but the family horizon is " +
                         std::to_string(horizon));
  }
}

} // namespace detail

// ---------------------------------------------------------------------------
// analyze: single-sequence Cauchy / witness / refuting-prefix analysis.

struct analyze_config {
  std::string expr_text;            // exact lane, with horizon
  std::string trace_path;           // float64 lane (one of the two)
  std::size_t row = 0;              // trace row selector
  std::size_t horizon = 0;          // required with expr_text
  std::vector<std::string> epsilons;
  std::string sampling;             // optional: witness search target
  std::size_t refute_length = 0;    // optional: attempt a refuting prefix
};

namespace detail {

template <class Num, class Cmp>
nlohmann::ordered_json analyze_lane(const basic_sequence<Num>& x,
                                    const std::vector<rational>& epsilons,
                                    const std::optional<sampling_prefix>& eta,
                                    std::size_t refute_length, const Cmp& cmp,
                                    verdict_kind& overall) {
  overall = verdict_kind::certified_at_horizon;
  nlohmann::ordered_json per_eps = nlohmann::ordered_json::array();
  for (const rational& eps_exact : epsilons) {
    const Num eps = num_from_rational<Num>(eps_exact);
    nlohmann::ordered_json e;
    e["epsilon"] = to_string(eps_exact);
    std::size_t n = cauchy_index(x, eps, cmp);
    bool informative = cauchy_informative(x, n);
    e["cauchy_index"] = n;
    e["informative"] = informative;
    verdict_kind v = informative ? verdict_kind::certified_at_horizon
                                 : verdict_kind::inconclusive;
    e["verdict"] = to_string(v);
    overall = worst(overall, v);
    if (eta) {
      auto w = find_witness(x, eps, *eta, cmp);
      if (w) {
        nlohmann::ordered_json wj;
        wj["level"] = w->level;
        wj["oscillation"] = num_io<Num>::to_json(w->oscillation);
        e["witness"] = std::move(wj);
      } else {
        e["witness"] = nullptr;
      }
    }
    if (refute_length > 0) {
      auto r = refuting_sampling(x, eps, refute_length, cmp);
      e["refuting_sampling"] = r ? r->to_json() : nlohmann::ordered_json(nullptr);
    }
    per_eps.push_back(std::move(e));
  }
  nlohmann::ordered_json result;
  result["verdict"] = to_string(overall);
  result["label"] = x.label();
  result["source"] = to_string(x.kind());
  result["horizon"] = x.horizon();
  if (eta) result["sampling"] = eta->to_json();
  result["per_epsilon"] = std::move(per_eps);
  return result;
}

} // namespace detail

inline driver_result run_analyze(const analyze_config& cfg, const run_context& ctx) {
  detail::stopwatch clock;
  const bool from_expr = !cfg.expr_text.empty();
  if (from_expr == !cfg.trace_path.empty())
    throw config_error("analyze needs exactly one sequence source (--expr or --trace)");
  std::vector<rational> epsilons = detail::parse_epsilons(cfg.epsilons);
  std::optional<sampling_prefix> eta;
  if (!cfg.sampling.empty()) eta = parse_sampling_source(cfg.sampling);

  nlohmann::ordered_json config;
  if (from_expr) {
    config["expr"] = cfg.expr_text;
    config["horizon"] = cfg.horizon;
  } else {
    config["trace"] = cfg.trace_path;
    config["row"] = cfg.row;
    config["tolerance"] = ctx.tolerance;
  }
  config["epsilons"] = cfg.epsilons;
  if (!cfg.sampling.empty()) config["sampling"] = cfg.sampling;
  if (cfg.refute_length > 0) config["refute_length"] = cfg.refute_length;

  verdict_kind verdict = verdict_kind::inconclusive;
  nlohmann::ordered_json result;
  const char* lane = nullptr;
  if (from_expr) {
    lane = num_io<rational>::lane;
    if (cfg.horizon < 1) throw config_error("--horizon: required (>= 1) with --expr");
    expr e = parse_sequence_expr(cfg.expr_text);
    std::vector<rational> values(cfg.horizon);
    for (std::size_t n = 0; n < cfg.horizon; ++n) values[n] = eval_sequence_expr(e, n);
    basic_sequence<rational> x(std::move(values), source_kind::expression, print_expr(e));
    if (eta && !(eta->max_index() < x.horizon()))
      throw config_error("--sampling: references index " + std::to_string(eta->max_index()) +
                         ", but the horizon is " + std::to_string(x.horizon()));
    result = detail::analyze_lane(x, epsilons, eta, cfg.refute_length, exact_cmp{}, verdict);
  } else {
    lane = num_io<double>::lane;
    std::ifstream f(cfg.trace_path);
    if (!f) throw config_error("--trace: cannot open file '" + cfg.trace_path + "'");
    family_spec<double> fam = ingest_trace(f, cfg.trace_path);
    if (cfg.row >= fam.sample.size())
      throw config_error("--row: " + std::to_string(cfg.row) + " out of range (trace has " +
                         std::to_string(fam.sample.size()) + " rows)");
    const basic_sequence<double>& x = fam.sample.member(cfg.row);
    if (eta && !(eta->max_index() < x.horizon()))
      throw config_error("--sampling: references index " + std::to_string(eta->max_index()) +
                         ", but the horizon is " + std::to_string(x.horizon()));
    result = detail::analyze_lane(x, epsilons, eta, cfg.refute_length,
                                  tol_cmp{ctx.tolerance}, verdict);
  }

  driver_result out;
  out.exit_code = detail::exit_for(verdict);
  out.report = detail::make_report("analyze", lane, std::move(config), std::move(result),
                                   ctx.timing ? std::optional<double>(clock.ms()) : std::nullopt);
  return out;
}

// ---------------------------------------------------------------------------
// certify: check a rate against a family over epsilon/sampling collections.

struct certify_config {
  std::string family;
  std::vector<std::string> epsilons;
  std::vector<std::string> samplings;
  std::string rate;
};

namespace detail {

template <class Num, class Cmp>
nlohmann::ordered_json certify_lane(const family_sample<Num>& sample,
                                    const std::vector<rational>& epsilons,
                                    const std::vector<sampling_prefix>& etas,
                                    const rate_bound& rate, const Cmp& cmp,
                                    const run_context& ctx, verdict_kind& verdict) {
  auto cert = certify_uniform(sample, epsilons, etas, rate, cmp, run_options{ctx.threads});
  verdict = cert.verdict;
  nlohmann::ordered_json result;
  result["verdict"] = to_string(cert.verdict);
  if (cert.verdict == verdict_kind::refuted)
    result["refutation"] = to_json(*first_failure_refutation(cert, sample, cmp));
  result["certificate"] = to_json(cert);
  return result;
}

} // namespace detail

inline driver_result run_certify(const certify_config& cfg, const run_context& ctx) {
  detail::stopwatch clock;
  loaded_family fam = load_family_source(cfg.family);
  std::vector<rational> epsilons = detail::parse_epsilons(cfg.epsilons);
  if (cfg.samplings.empty()) throw config_error("--sampling: at least one source is required");
  std::vector<sampling_prefix> etas;
  for (const std::string& s : cfg.samplings) etas.push_back(parse_sampling_source(s));
  detail::require_within_horizon(etas, fam.horizon());
  rate_bound rate = parse_rate_source(cfg.rate);

  nlohmann::ordered_json config;
  config["family"] = cfg.family;
  config["epsilons"] = cfg.epsilons;
  config["samplings"] = cfg.samplings;
  config["rate"] = cfg.rate;
  if (!fam.exact) config["tolerance"] = ctx.tolerance;

  verdict_kind verdict = verdict_kind::inconclusive;
  nlohmann::ordered_json result;
  const char* lane;
  if (fam.exact) {
    lane = num_io<rational>::lane;
    result = detail::certify_lane(fam.exact_family->sample, epsilons, etas, rate, exact_cmp{},
                                  ctx, verdict);
  } else {
    lane = num_io<double>::lane;
    result = detail::certify_lane(fam.trace_family->sample, epsilons, etas, rate,
                                  tol_cmp{ctx.tolerance}, ctx, verdict);
  }

  driver_result out;
  out.exit_code = detail::exit_for(verdict);
  out.report = detail::make_report("certify", lane, std::move(config), std::move(result),
                                   ctx.timing ? std::optional<double>(clock.ms()) : std::nullopt);
  return out;
}

// ---------------------------------------------------------------------------
// refute: try to defeat a claimed constant bound.

struct refute_config {
  std::string family;
  std::vector<std::string> epsilons;  // exactly one
  std::size_t bound = 0;
  std::string strategy = "adversary";
};

namespace detail {

template <class Num, class Cmp>
nlohmann::ordered_json refute_lane(const family_spec<Num>& fam, const rational& eps,
                                   std::size_t bound, refute_strategy strategy, const Cmp& cmp,
                                   const run_context& ctx, bool& refuted) {
  auto ref = refute_uniform_bound(fam, eps, bound, strategy, cmp, run_options{ctx.threads});
  refuted = ref.has_value();
  nlohmann::ordered_json result;
  if (ref) {
    result["outcome"] = "refuted";
    result["verdict"] = to_string(verdict_kind::refuted);
    result["refutation"] = to_json(*ref);
  } else {
    result["outcome"] = "no-refutation-found";
    result["verdict"] = "no-refutation-found";
    result["note"] = std::string("the ") + to_string(strategy) +
                     " strategy could not defeat bound " + std::to_string(bound) +
                     " at this horizon";
  }
  return result;
}

} // namespace detail

inline driver_result run_refute(const refute_config& cfg, const run_context& ctx) {
  detail::stopwatch clock;
  loaded_family fam = load_family_source(cfg.family);
  std::vector<rational> epsilons = detail::parse_epsilons(cfg.epsilons);
  if (epsilons.size() != 1)
    throw config_error("--epsilon: refute takes exactly one epsilon, got " +
                       std::to_string(epsilons.size()));
  if (cfg.bound < 1) throw config_error("--bound: must be >= 1");
  refute_strategy strategy;
  if (cfg.strategy == "adversary")
    strategy = refute_strategy::adversary;
  else if (cfg.strategy == "exhaustive")
    strategy = refute_strategy::exhaustive;
  else
    throw config_error("--strategy: expected 'adversary' or 'exhaustive', got '" + cfg.strategy +
                       "'");

  nlohmann::ordered_json config;
  config["family"] = cfg.family;
  config["epsilons"] = cfg.epsilons;
  config["bound"] = cfg.bound;
  config["strategy"] = cfg.strategy;
  if (!fam.exact) config["tolerance"] = ctx.tolerance;

  bool refuted = false;
  nlohmann::ordered_json result;
  const char* lane;
  if (fam.exact) {
    lane = num_io<rational>::lane;
    result = detail::refute_lane(*fam.exact_family, epsilons[0], cfg.bound, strategy,
                                 exact_cmp{}, ctx, refuted);
  } else {
    lane = num_io<double>::lane;
    result = detail::refute_lane(*fam.trace_family, epsilons[0], cfg.bound, strategy,
                                 tol_cmp{ctx.tolerance}, ctx, refuted);
  }

  driver_result out;
  out.exit_code = refuted ? 1 : 0;
  out.report = detail::make_report("refute", lane, std::move(config), std::move(result),
                                   ctx.timing ? std::optional<double>(clock.ms()) : std::nullopt);
  return out;
}

// ---------------------------------------------------------------------------
// synth: least certifiable constant bound over the collections.

struct synth_config {
  std::string family;
  std::vector<std::string> epsilons;
  std::vector<std::string> samplings;
};

namespace detail {

template <class Num, class Cmp>
nlohmann::ordered_json synth_lane(const family_sample<Num>& sample,
                                  const std::vector<rational>& epsilons,
                                  const std::vector<sampling_prefix>& etas, const Cmp& cmp,
                                  const run_context& ctx, verdict_kind& verdict) {
  auto res = synth_minimal_uniform_rate(sample, epsilons, etas, cmp, run_options{ctx.threads});
  verdict = res.verdict;
  nlohmann::ordered_json result;
  result["verdict"] = to_string(res.verdict);
  if (res.rate)
    result["rate"] = *res.rate;
  else
    result["rate"] = nullptr;
  result["synthesis"] = to_json(res);
  return result;
}

} // namespace detail

inline driver_result run_synth(const synth_config& cfg, const run_context& ctx) {
  detail::stopwatch clock;
  loaded_family fam = load_family_source(cfg.family);
  std::vector<rational> epsilons = detail::parse_epsilons(cfg.epsilons);
  if (cfg.samplings.empty()) throw config_error("--sampling: at least one source is required");
  std::vector<sampling_prefix> etas;
  for (const std::string& s : cfg.samplings) etas.push_back(parse_sampling_source(s));
  detail::require_within_horizon(etas, fam.horizon());

  nlohmann::ordered_json config;
  config["family"] = cfg.family;
  config["epsilons"] = cfg.epsilons;
  config["samplings"] = cfg.samplings;
  if (!fam.exact) config["tolerance"] = ctx.tolerance;

  verdict_kind verdict = verdict_kind::inconclusive;
  nlohmann::ordered_json result;
  const char* lane;
  if (fam.exact) {
    lane = num_io<rational>::lane;
    result =
        detail::synth_lane(fam.exact_family->sample, epsilons, etas, exact_cmp{}, ctx, verdict);
  } else {
    lane = num_io<double>::lane;
    result = detail::synth_lane(fam.trace_family->sample, epsilons, etas,
                                tol_cmp{ctx.tolerance}, ctx, verdict);
  }

  driver_result out;
  out.exit_code = detail::exit_for(verdict);
  out.report = detail::make_report("synth", lane, std::move(config), std::move(result),
                                   ctx.timing ? std::optional<double>(clock.ms()) : std::nullopt);
  return out;
}

// ---------------------------------------------------------------------------
// prop23: build the step-vs-constant instance and analyze it.

struct prop23_config {
  std::size_t points = 0;
  std::size_t horizon = 0;  // 0: default 2 * points
  std::vector<std::string> epsilons;
  std::string sampling;  // optional: default pairs of length horizon - 1
};

inline driver_result run_prop23(const prop23_config& cfg, const run_context& ctx) {
  detail::stopwatch clock;
  const std::size_t horizon = cfg.horizon ? cfg.horizon : 2 * cfg.points;
  function_family_view<rational> view = build_prop23_instance(cfg.points, horizon);
  std::vector<rational> epsilons = detail::parse_epsilons(cfg.epsilons);
  sampling_prefix eta = cfg.sampling.empty()
                            ? pairs_sampling(horizon > 1 ? horizon - 1 : 1)
                            : parse_sampling_source(cfg.sampling);
  if (!(eta.max_index() < horizon))
    throw config_error("--sampling: references index " + std::to_string(eta.max_index()) +
                       ", but the horizon is " + std::to_string(horizon));

  nlohmann::ordered_json config;
  config["points"] = cfg.points;
  config["horizon"] = horizon;
  config["epsilons"] = cfg.epsilons;
  config["sampling"] = cfg.sampling.empty()
                           ? "pairs:" + std::to_string(horizon > 1 ? horizon - 1 : 1)
                           : cfg.sampling;

  verdict_kind verdict = verdict_kind::certified_at_horizon;
  nlohmann::ordered_json per_eps = nlohmann::ordered_json::array();
  run_options opts{ctx.threads};
  for (const rational& eps : epsilons) {
    nlohmann::ordered_json e;
    e["epsilon"] = to_string(eps);
    pointwise_report pw = check_pointwise(view, eps, exact_cmp{}, opts);
    synth_result<rational> uni = uniform_over_points(view, eps, eta, exact_cmp{}, opts);
    verdict = detail::worst(verdict, detail::worst(pw.verdict, uni.verdict));
    e["pointwise"] = to_json(pw);
    e["uniform"] = to_json(uni);
    per_eps.push_back(std::move(e));
  }

  nlohmann::ordered_json result;
  result["verdict"] = to_string(verdict);
  result["family"] = view.provenance();
  result["points"] = view.points().labels();
  result["per_epsilon"] = std::move(per_eps);

  driver_result out;
  out.exit_code = detail::exit_for(verdict);
  out.report = detail::make_report("prop23", num_io<rational>::lane, std::move(config),
                                   std::move(result),
                                   ctx.timing ? std::optional<double>(clock.ms()) : std::nullopt);
  return out;
}

// ---------------------------------------------------------------------------
// logic: evaluate a sentence sequence on a theory's model grid and analyze.

struct logic_config {
  std::vector<std::string> atoms;
  std::string theory_path;     // optional, empty theory otherwise
  std::string sentences_path;  // one of sentences_path / template_text
  std::string template_text;
  std::size_t horizon = 0;  // required with template_text
  std::size_t resolution = 0;
  std::vector<std::string> epsilons;
  std::string sampling;  // optional: default pairs of length (sentences - 1)
};

inline driver_result run_logic(const logic_config& cfg, const run_context& ctx) {
  detail::stopwatch clock;
  language lang(cfg.atoms);
  const bool from_template = !cfg.template_text.empty();
  if (from_template == !cfg.sentences_path.empty())
    throw config_error("logic needs exactly one sentence source (--sentences or --template)");

  std::vector<formula> theory;
  if (!cfg.theory_path.empty()) {
    std::ifstream f(cfg.theory_path);
    if (!f) throw config_error("--theory: cannot open file '" + cfg.theory_path + "'");
    theory = parse_theory_file(f, lang);
  }

  std::vector<formula> sentences;
  if (from_template) {
    if (cfg.horizon < 1) throw config_error("--horizon: required (>= 1) with --template");
    sentences = expand_template(parse_sentence_template(cfg.template_text, lang), cfg.horizon);
  } else {
    std::ifstream f(cfg.sentences_path);
    if (!f) throw config_error("--sentences: cannot open file '" + cfg.sentences_path + "'");
    sentences = parse_sentence_file(f, lang);
  }

  if (cfg.resolution < 1) throw config_error("--grid-resolution: must be >= 1");
  std::vector<rational> epsilons = detail::parse_epsilons(cfg.epsilons);
  sampling_prefix eta =
      cfg.sampling.empty()
          ? pairs_sampling(sentences.size() > 1 ? sentences.size() - 1 : 1)
          : parse_sampling_source(cfg.sampling);

  nlohmann::ordered_json config;
  config["atoms"] = cfg.atoms;
  if (!cfg.theory_path.empty()) config["theory"] = cfg.theory_path;
  if (from_template) {
    config["template"] = cfg.template_text;
    config["horizon"] = cfg.horizon;
  } else {
    config["sentences"] = cfg.sentences_path;
  }
  config["grid_resolution"] = cfg.resolution;
  config["epsilons"] = cfg.epsilons;
  config["sampling"] =
      cfg.sampling.empty()
          ? "pairs:" + std::to_string(sentences.size() > 1 ? sentences.size() - 1 : 1)
          : cfg.sampling;

  run_options opts{ctx.threads};
  verdict_kind verdict = verdict_kind::certified_at_horizon;
  nlohmann::ordered_json per_eps = nlohmann::ordered_json::array();
  std::size_t model_count = 0;
  bool empty_model_class = false;
  for (const rational& eps : epsilons) {
    logic_analysis a = analyze_modulo(lang, theory, sentences, eps, eta, cfg.resolution, opts);
    model_count = a.model_count;
    empty_model_class = a.empty_model_class;
    nlohmann::ordered_json e;
    e["epsilon"] = to_string(eps);
    if (a.empty_model_class) {
      e["verdict"] = to_string(a.verdict());
      e["note"] = "theory has no models at this resolution; the uniform claim holds vacuously";
    } else {
      e["verdict"] = to_string(a.verdict());
      e["pointwise"] = to_json(*a.pointwise);
      e["uniform"] = to_json(*a.uniform);
    }
    verdict = detail::worst(verdict, a.verdict());
    per_eps.push_back(std::move(e));
  }

  nlohmann::ordered_json theory_texts = nlohmann::ordered_json::array();
  for (const formula& f : theory) theory_texts.push_back(print_formula(f));

  nlohmann::ordered_json result;
  result["verdict"] = to_string(verdict);
  result["atoms"] = lang.atoms();
  result["theory"] = std::move(theory_texts);
  result["sentence_count"] = sentences.size();
  result["grid_resolution"] = cfg.resolution;
  result["model_count"] = model_count;
  result["empty_model_class"] = empty_model_class;
  result["per_epsilon"] = std::move(per_eps);

  driver_result out;
  out.exit_code = detail::exit_for(verdict);
  out.report = detail::make_report("logic", num_io<rational>::lane, std::move(config),
                                   std::move(result),
                                   ctx.timing ? std::optional<double>(clock.ms()) : std::nullopt);
  return out;
}

// ---------------------------------------------------------------------------
// gen-sampling: expand a sampling source to its JSON file form. The output is
// the bare sampling object (loadable via @file), not a wrapped report.

struct gen_sampling_config {
  std::string sampling;
};

inline driver_result run_gen_sampling(const gen_sampling_config& cfg, const run_context&) {
  sampling_prefix eta = parse_sampling_source(cfg.sampling);
  driver_result out;
  out.exit_code = 0;
  out.report = eta.to_json();
  return out;
}

} // namespace metastab
