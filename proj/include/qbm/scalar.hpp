#pragma once

#include <gmpxx.h>

#include <concepts>
#include <string>
#include <string_view>

namespace qbm {

/// Exact arbitrary-precision rational used by the identity layer.
using Rational = mpq_class;

/// The two scalar fields the library is instantiated over.
template <class T>
concept Scalar = std::same_as<T, double> || std::same_as<T, Rational>;

template <Scalar T>
inline constexpr bool is_exact_v = std::same_as<T, Rational>;

/// num / den in canonical form (mpq_class(num, den) alone does not reduce).
inline Rational ratio(long num, long den) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

inline double to_double(double v) { return v; }
/// Nearest double (mpq_class::get_d truncates toward zero).
double to_double(const Rational& v);

/// Converts a double into T; exact for Rational (every finite double is a dyadic rational).
template <Scalar T>
T from_double(double v) {
  if constexpr (is_exact_v<T>) {
    return Rational(v);
  } else {
    return v;
  }
}

/// Raises to a nonnegative integer power by repeated squaring.
template <Scalar T>
T ipow(T base, unsigned exponent) {
  T result(1);
  while (exponent != 0) {
    if (exponent & 1U) result *= base;
    exponent >>= 1U;
    if (exponent != 0) base *= base;
  }
  return result;
}

template <Scalar T>
T abs_value(const T& v) {
  if constexpr (is_exact_v<T>) {
    return abs(v);
  } else {
    return v < 0 ? -v : v;
  }
}

/// Parses "n/d", an integer, or a decimal such as "0.2" or "2.5e-1" into an exact rational.
/// Decimal input is converted digit by digit, so "0.2" becomes exactly 1/5.
Rational parse_rational(std::string_view text);

/// "n/d" (or "n" when the denominator is 1).
std::string to_string(const Rational& v);

/// Shortest round-trip decimal representation.
std::string to_string(double v);

}  // namespace qbm
