#pragma once
// Exact rational arithmetic helpers shared by the tree designer and the
// balance verifiers. All threshold comparisons in the designer are exact;
// doubles appear only at reporting boundaries.

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace treematch {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Configuration errors: bad sizes, ranges, malformed inputs.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Designer infeasibility: no admissible parameter set within the budget.
struct DesignError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline BigInt rat_num(const Rational& r) { return boost::multiprecision::numerator(r); }
inline BigInt rat_den(const Rational& r) { return boost::multiprecision::denominator(r); }

// Largest integer <= r. cpp_int division truncates toward zero, so negative
// non-integers need one correction step.
inline BigInt rat_floor(const Rational& r) {
  BigInt num = rat_num(r), den = rat_den(r);
  BigInt q = num / den;
  if (num < 0 && q * den != num) --q;
  return q;
}

inline BigInt rat_ceil(const Rational& r) { return -rat_floor(-r); }

inline bool rat_is_integer(const Rational& r) { return rat_den(r) == 1; }

inline double rat_to_double(const Rational& r) { return r.convert_to<double>(); }

// "p/q" with q > 0, always slash-separated so consumers never guess the type.
inline std::string rat_to_pq(const Rational& r) {
  return rat_num(r).str() + "/" + rat_den(r).str();
}

inline long long rat_floor_ll(const Rational& r) {
  return rat_floor(r).convert_to<long long>();
}

// Parses a decimal literal ("0.75", ".5", "3", "1e-9", "12.5e+2") into an
// exact rational. Keeping alpha/epsilon exact matters: the binary double
// nearest 0.6 already flips the integer part of 1/(2*0.6-1).
inline Rational rat_from_decimal(const std::string& text) {
  std::size_t i = 0;
  const std::size_t n = text.size();
  bool negative = false;
  if (i < n && (text[i] == '+' || text[i] == '-')) {
    negative = (text[i] == '-');
    ++i;
  }
  BigInt digits = 0;
  long long frac_len = 0;
  bool any_digit = false;
  for (; i < n && text[i] >= '0' && text[i] <= '9'; ++i) {
    digits = digits * 10 + (text[i] - '0');
    any_digit = true;
  }
  if (i < n && text[i] == '.') {
    ++i;
    for (; i < n && text[i] >= '0' && text[i] <= '9'; ++i) {
      digits = digits * 10 + (text[i] - '0');
      ++frac_len;
      any_digit = true;
    }
  }
  if (!any_digit) throw ConfigError("not a decimal number: '" + text + "'");
  long long exp10 = 0;
  if (i < n && (text[i] == 'e' || text[i] == 'E')) {
    ++i;
    bool exp_neg = false;
    if (i < n && (text[i] == '+' || text[i] == '-')) {
      exp_neg = (text[i] == '-');
      ++i;
    }
    if (i >= n) throw ConfigError("truncated exponent in '" + text + "'");
    long long e = 0;
    for (; i < n && text[i] >= '0' && text[i] <= '9'; ++i) {
      e = e * 10 + (text[i] - '0');
      if (e > 1000000) throw ConfigError("exponent out of range in '" + text + "'");
    }
    exp10 = exp_neg ? -e : e;
  }
  if (i != n) throw ConfigError("trailing characters in number '" + text + "'");

  BigInt num = digits, den = 1;
  long long shift = exp10 - frac_len;
  if (shift > 0)
    num *= boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(shift));
  else if (shift < 0)
    den = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(-shift));
  if (negative) num = -num;
  return Rational(num, den);
}

}  // namespace treematch
