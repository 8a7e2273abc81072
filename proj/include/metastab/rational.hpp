#pragma once

#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

#include "metastab/errors.hpp"

namespace metastab {

using bigint = boost::multiprecision::cpp_int;
using rational = boost::multiprecision::cpp_rational;

// Canonical text form: "p" when the denominator is 1, else "p/q", q > 0.
inline std::string to_string(const rational& r) {
  const bigint num = boost::multiprecision::numerator(r);
  const bigint den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

inline rational rational_pow(const rational& base, long exponent) {
  if (exponent == 0) return rational(1);  // 0^0 = 1 by convention
  bool invert = exponent < 0;
  unsigned long e = invert ? static_cast<unsigned long>(-(exponent + 1)) + 1UL
                           : static_cast<unsigned long>(exponent);
  if (invert && base == 0)
    throw error("zero raised to a negative power");
  bigint num = boost::multiprecision::pow(boost::multiprecision::numerator(base), static_cast<unsigned>(e));
  bigint den = boost::multiprecision::pow(boost::multiprecision::denominator(base), static_cast<unsigned>(e));
  return invert ? rational(den, num) : rational(num, den);
}

inline bigint rational_ceil(const rational& r) {
  bigint num = boost::multiprecision::numerator(r);
  bigint den = boost::multiprecision::denominator(r);
  bigint q = num / den;  // truncates toward zero
  if (q * den != num && num > 0) ++q;
  return q;
}

// Accepts "p", "p/q" and plain decimals like "0.25" or "-3.5"; all exact.
inline rational parse_rational(std::string_view text) {
  auto fail = [&]() -> rational {
    throw config_error("not a rational number: '" + std::string(text) + "'");
  };
  std::string s(text);
  // trim
  std::size_t b = s.find_first_not_of(" \t");
  std::size_t e = s.find_last_not_of(" \t");
  if (b == std::string::npos) return fail();
  s = s.substr(b, e - b + 1);

  auto is_int = [](std::string_view v) {
    if (v.empty()) return false;
    std::size_t i = (v[0] == '-' || v[0] == '+') ? 1 : 0;
    if (i == v.size()) return false;
    for (; i < v.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(v[i]))) return false;
    return true;
  };

  std::size_t slash = s.find('/');
  if (slash != std::string::npos) {
    std::string p = s.substr(0, slash), q = s.substr(slash + 1);
    if (!is_int(p) || !is_int(q)) return fail();
    bigint den(q);
    if (den == 0) throw config_error("zero denominator in '" + std::string(text) + "'");
    return rational(bigint(p), den);
  }
  std::size_t dot = s.find('.');
  if (dot != std::string::npos) {
    std::string ip = s.substr(0, dot), fp = s.substr(dot + 1);
    bool negative = !ip.empty() && ip[0] == '-';
    if (!ip.empty() && (ip[0] == '-' || ip[0] == '+')) ip = ip.substr(1);
    if (ip.empty() && fp.empty()) return fail();
    for (char c : ip + fp)
      if (!std::isdigit(static_cast<unsigned char>(c))) return fail();
    bigint num(ip.empty() ? "0" : ip);
    bigint den(1);
    for (char c : fp) {
      num = num * 10 + (c - '0');
      den *= 10;
    }
    rational r(num, den);
    return negative ? rational(-r) : r;
  }
  if (!is_int(s)) return fail();
  return rational(bigint(s));
}

} // namespace metastab
