#pragma once

#include <cmath>
#include <string>

#include <nlohmann/json.hpp>

#include "metastab/rational.hpp"

namespace metastab {

// The two numeric lanes. Closed-form / expression-defined sequences live in
// exact rationals; ingested traces live in float64 with one absolute
// comparison tolerance. Strict comparisons on the float64 lane hold only when
// they clear the tolerance, so values within `tolerance` compare equal and a
// witness has to beat epsilon robustly. The refutation predicate is always
// the exact complement (!less), keeping witness/refutation a partition.

struct exact_cmp {
  bool less(const rational& a, const rational& b) const { return a < b; }
};

struct tol_cmp {
  double tolerance = 1e-9;
  bool less(double a, double b) const { return a < b - tolerance; }
};

template <class Num> struct default_cmp;
template <> struct default_cmp<rational> { using type = exact_cmp; };
template <> struct default_cmp<double> { using type = tol_cmp; };
template <class Num> using default_cmp_t = typename default_cmp<Num>::type;

// JSON encoding per lane: rationals as canonical "p/q" strings, doubles as
// JSON numbers (nlohmann round-trips float64 exactly).
template <class Num> struct num_io;

template <> struct num_io<rational> {
  static constexpr const char* lane = "exact";
  static nlohmann::ordered_json to_json(const rational& v) { return to_string(v); }
  static rational from_json(const nlohmann::json& j) {
    if (!j.is_string()) throw config_error("expected rational string, got: " + j.dump());
    return parse_rational(j.get<std::string>());
  }
  static rational parse(const std::string& s) { return parse_rational(s); }
  static std::string str(const rational& v) { return to_string(v); }
};

template <> struct num_io<double> {
  static constexpr const char* lane = "float64";
  static nlohmann::ordered_json to_json(double v) { return v; }
  static double from_json(const nlohmann::json& j) {
    if (!j.is_number()) throw config_error("expected number, got: " + j.dump());
    return j.get<double>();
  }
  static double parse(const std::string& s) {
    try {
      std::size_t pos = 0;
      double v = std::stod(s, &pos);
      if (pos != s.size()) throw config_error("trailing characters in number '" + s + "'");
      if (!std::isfinite(v)) throw config_error("non-finite number '" + s + "'");
      return v;
    } catch (const std::invalid_argument&) {
      throw config_error("not a number: '" + s + "'");
    } catch (const std::out_of_range&) {
      throw config_error("number out of range: '" + s + "'");
    }
  }
  static std::string str(double v) { return nlohmann::json(v).dump(); }
};

template <class Num> Num num_abs(const Num& v) { return v < 0 ? Num(-v) : v; }

// Epsilons and rate expressions are carried exactly; each lane converts at
// the comparison boundary (exactly for rationals, nearest float64 otherwise).
template <class Num> Num num_from_rational(const rational& r);
template <> inline rational num_from_rational<rational>(const rational& r) { return r; }
template <> inline double num_from_rational<double>(const rational& r) {
  return r.convert_to<double>();
}

} // namespace metastab
