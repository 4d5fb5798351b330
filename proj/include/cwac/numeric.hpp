#pragma once

#include <cstdint>
#include <numeric>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

#include "cwac/errors.hpp"

namespace cwac {

using Count = std::int64_t;

// Exact rationals; all circle-valued quantities are carried as these.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline Count checked_add(Count a, Count b) {
  Count r;
  if (__builtin_add_overflow(a, b, &r)) throw OverflowError("integer overflow in addition");
  return r;
}

inline Count checked_sub(Count a, Count b) {
  Count r;
  if (__builtin_sub_overflow(a, b, &r)) throw OverflowError("integer overflow in subtraction");
  return r;
}

inline Count checked_mul(Count a, Count b) {
  Count r;
  if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("integer overflow in multiplication");
  return r;
}

// Euclidean remainder in [0, m).
inline Count mod_floor(Count a, Count m) {
  Count r = a % m;
  return r < 0 ? r + m : r;
}

/// Fractional part in [0,1).
Rational frac(const Rational& t);

/// Distance from t to 0 on the circle R/Z.
Rational circle_norm(const Rational& t);

/// Parses "p/q" or "p" exactly; throws ArgumentError on malformed input.
Rational parse_rational(const std::string& text);

std::string to_string(const Rational& r);

}  // namespace cwac
