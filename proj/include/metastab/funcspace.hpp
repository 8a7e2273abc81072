#pragma once

#include <algorithm>
#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "metastab/certify.hpp"
#include "metastab/family.hpp"
#include "metastab/metastability.hpp"
#include "metastab/parallel.hpp"
#include "metastab/trace.hpp"

namespace metastab {

// A finite ordered set of evaluation points. Labels double as CSV column
// headers, so they must be nonempty and free of separators.
class point_set {
public:
  explicit point_set(std::vector<std::string> labels) : labels_(std::move(labels)) {
    if (labels_.empty()) throw config_error("point set must be nonempty");
    for (const std::string& l : labels_) {
      if (l.empty() || l.find_first_of(",\n\r") != std::string::npos)
        throw config_error("point label '" + l + "' is empty or contains a separator");
    }
    std::vector<std::string> sorted = labels_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw config_error("point labels must be unique");
  }

  std::size_t size() const noexcept { return labels_.size(); }
  const std::string& label(std::size_t p) const {
    if (p >= labels_.size())
      throw lookup_error("point index " + std::to_string(p) + " out of range (size " +
                         std::to_string(labels_.size()) + ")");
    return labels_[p];
  }
  std::optional<std::size_t> index_of(const std::string& label) const {
    for (std::size_t p = 0; p < labels_.size(); ++p)
      if (labels_[p] == label) return p;
    return std::nullopt;
  }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

private:
  std::vector<std::string> labels_;
};

// A horizon-bounded sequence of functions on a finite point set, stored as
// the full evaluation matrix values[n][p] = f_n(point p). Per-point slices
// n |-> f_n(x) are ordinary sequences; everything uniform-metastability
// related is delegated to the family machinery through them.
template <class Num>
class function_family_view {
public:
  function_family_view(point_set points, std::vector<std::vector<Num>> values,
                       std::string provenance)
      : points_(std::move(points)), values_(std::move(values)),
        provenance_(std::move(provenance)) {
    if (values_.empty()) throw config_error("function family horizon must be >= 1");
    for (std::size_t n = 0; n < values_.size(); ++n)
      if (values_[n].size() != points_.size())
        throw config_error("function family level " + std::to_string(n) + " has " +
                           std::to_string(values_[n].size()) + " values for " +
                           std::to_string(points_.size()) + " points");
  }

  std::size_t horizon() const noexcept { return values_.size(); }
  const point_set& points() const noexcept { return points_; }
  const std::string& provenance() const noexcept { return provenance_; }

  const Num& value(std::size_t n, std::size_t p) const {
    if (n >= values_.size()) throw out_of_horizon_error(n, values_.size());
    (void)points_.label(p);  // range check with the same error as elsewhere
    return values_[n][p];
  }

  basic_sequence<Num> slice(std::size_t p) const {
    std::vector<Num> v;
    v.reserve(values_.size());
    for (std::size_t n = 0; n < values_.size(); ++n) v.push_back(values_[n][p]);
    return basic_sequence<Num>(std::move(v), source_kind::closed_form, points_.label(p));
  }

private:
  point_set points_;
  std::vector<std::vector<Num>> values_;
  std::string provenance_;
};

// One family member per point, in point order, labeled by the point.
template <class Num>
family_sample<Num> slice_family(const function_family_view<Num>& view) {
  std::vector<basic_sequence<Num>> members;
  members.reserve(view.points().size());
  for (std::size_t p = 0; p < view.points().size(); ++p) members.push_back(view.slice(p));
  return family_sample<Num>(std::move(members), view.provenance());
}

// The classic gap between pointwise convergence and a uniform rate, on the
// points {0..P-1}: interleave the step functions g_k(x) = [x <= k] with the
// constant F = 1, i.e. h_{2k} = g_k and h_{2k+1} = F. Every point slice is
// eventually the constant 1 (from index max(0, 2x-1) on), yet the witness
// level needed grows with x, so no bound uniform in the point survives P.
inline function_family_view<rational> build_prop23_instance(std::size_t points,
                                                            std::size_t horizon) {
  if (points < 1) throw config_error("instance needs at least one point");
  if (horizon < 2 * points)
    throw config_error("instance needs horizon >= " + std::to_string(2 * points) +
                       " for " + std::to_string(points) + " points");
  std::vector<std::string> labels;
  labels.reserve(points);
  for (std::size_t x = 0; x < points; ++x) labels.push_back("x" + std::to_string(x));
  std::vector<std::vector<rational>> values(horizon, std::vector<rational>(points));
  for (std::size_t n = 0; n < horizon; ++n) {
    for (std::size_t x = 0; x < points; ++x) {
      bool one = (n % 2 == 1) || (x <= n / 2);
      values[n][x] = rational(one ? 1 : 0);
    }
  }
  return function_family_view<rational>(point_set(std::move(labels)), std::move(values),
                                        "step-vs-constant(P=" + std::to_string(points) +
                                            ", H=" + std::to_string(horizon) + ")");
}

struct pointwise_entry {
  std::size_t point_index = 0;
  std::string point;
  std::size_t modulus = 0;  // least N with the whole tail [N, H) within epsilon
  verdict_kind verdict = verdict_kind::inconclusive;
};

struct pointwise_report {
  rational epsilon;
  std::size_t horizon = 0;
  std::string family;
  std::vector<pointwise_entry> entries;  // point order
  verdict_kind verdict = verdict_kind::inconclusive;
};

// Per-point convergence moduli at one epsilon. A point certifies when its
// modulus leaves an observable tail (at least two terms); a modulus of H-1
// only says the horizon ran out, which is inconclusive, never refuted — no
// finite prefix refutes convergence.
template <class Num, class Cmp = default_cmp_t<Num>>
pointwise_report check_pointwise(const function_family_view<Num>& view, const rational& eps_exact,
                                 const Cmp& cmp = {}, const run_options& opts = {}) {
  if (!(eps_exact > 0)) throw config_error("epsilon must be > 0, got " + to_string(eps_exact));
  pointwise_report rep;
  rep.epsilon = eps_exact;
  rep.horizon = view.horizon();
  rep.family = view.provenance();
  rep.entries.resize(view.points().size());
  const Num eps = num_from_rational<Num>(eps_exact);
  parallel_for(rep.entries.size(), opts.threads, [&](std::size_t p) {
    pointwise_entry& e = rep.entries[p];
    e.point_index = p;
    e.point = view.points().label(p);
    basic_sequence<Num> slice = view.slice(p);
    e.modulus = cauchy_index(slice, eps, cmp);
    e.verdict = cauchy_informative(slice, e.modulus) ? verdict_kind::certified_at_horizon
                                                     : verdict_kind::inconclusive;
  });
  rep.verdict = verdict_kind::certified_at_horizon;
  for (const pointwise_entry& e : rep.entries)
    if (e.verdict != verdict_kind::certified_at_horizon) {
      rep.verdict = verdict_kind::inconclusive;
      break;
    }
  return rep;
}

inline nlohmann::ordered_json to_json(const pointwise_report& r) {
  nlohmann::ordered_json j;
  j["kind"] = "pointwise-report";
  j["verdict"] = to_string(r.verdict);
  j["family"] = r.family;
  j["horizon"] = r.horizon;
  j["epsilon"] = to_string(r.epsilon);
  nlohmann::ordered_json entries = nlohmann::ordered_json::array();
  for (const pointwise_entry& e : r.entries) {
    nlohmann::ordered_json o;
    o["point"] = e.point;
    o["modulus"] = e.modulus;
    o["verdict"] = to_string(e.verdict);
    entries.push_back(std::move(o));
  }
  j["points"] = std::move(entries);
  return j;
}

// Least uniform-in-the-point bound for one epsilon and one sampling prefix:
// exactly rate synthesis over the per-point slice family, so the certificate
// machinery, canonical ordering and verdict semantics all carry over.
template <class Num, class Cmp = default_cmp_t<Num>>
synth_result<Num> uniform_over_points(const function_family_view<Num>& view,
                                      const rational& eps_exact, const sampling_prefix& eta,
                                      const Cmp& cmp = {}, const run_options& opts = {}) {
  return synth_minimal_uniform_rate(slice_family(view), std::vector<rational>{eps_exact},
                                    std::vector<sampling_prefix>{eta}, cmp, opts);
}

// Matrix CSV: header row of point labels, then one row per level n with
// f_n(point) per column. Rationals print canonically ("p" or "p/q"); loading
// is float64-only, as for traces.
template <class Num>
void save_matrix(std::ostream& os, const function_family_view<Num>& view) {
  const point_set& pts = view.points();
  for (std::size_t p = 0; p < pts.size(); ++p) {
    if (p) os << ',';
    os << pts.label(p);
  }
  os << '\n';
  for (std::size_t n = 0; n < view.horizon(); ++n) {
    for (std::size_t p = 0; p < pts.size(); ++p) {
      if (p) os << ',';
      os << num_io<Num>::str(view.value(n, p));
    }
    os << '\n';
  }
}

inline function_family_view<double> load_matrix(std::istream& is, const std::string& provenance) {
  std::optional<point_set> points;
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t blank_after_data = 0;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (detail::trim(line).empty()) {
      if (points) blank_after_data = lineno;
      continue;
    }
    if (blank_after_data) throw ingest_error("blank line inside data", blank_after_data);
    auto cells = detail::split_csv_line(line);
    if (!points) {
      std::vector<std::string> labels;
      labels.reserve(cells.size());
      for (const std::string& c : cells) labels.push_back(detail::trim(c));
      points.emplace(std::move(labels));  // validates nonempty/unique labels
      continue;
    }
    if (cells.size() != points->size())
      throw ingest_error("row has " + std::to_string(cells.size()) + " cells for " +
                             std::to_string(points->size()) + " points",
                         rows.size() + 1);
    std::vector<double> values;
    values.reserve(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c)
      values.push_back(detail::parse_cell(cells[c], rows.size() + 1, c + 1));
    rows.push_back(std::move(values));
  }
  if (!points) throw config_error("matrix '" + provenance + "' is empty");
  if (rows.empty()) throw config_error("matrix '" + provenance + "' has a header but no rows");
  return function_family_view<double>(std::move(*points), std::move(rows),
                                      "matrix(" + provenance + ")");
}

} // namespace metastab
