#pragma once

#include <cstdint>
#include <numeric>
#include <string>

#include "perdec/errors.hpp"

namespace perdec {

/// Reduced nonnegative fraction on 64-bit integers with overflow checks.
/// Carries the exact rational part of a period; never compared through
/// floating point.
struct Fraction {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Fraction() = default;
  Fraction(std::int64_t n, std::int64_t d) : num(n), den(d) {
    if (den <= 0) throw InvalidInput("Fraction: denominator must be positive");
    if (num < 0) throw InvalidInput("Fraction: negative numerator");
    reduce();
  }

  void reduce() {
    if (num == 0) {
      den = 1;
      return;
    }
    const std::int64_t g = std::gcd(num, den);
    num /= g;
    den /= g;
  }

  double value() const {
    return static_cast<double>(num) / static_cast<double>(den);
  }

  bool operator==(const Fraction&) const = default;

  std::string str() const {
    return std::to_string(num) + "/" + std::to_string(den);
  }
};

namespace detail {

inline std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t out = 0;
  if (__builtin_mul_overflow(a, b, &out))
    throw InvalidInput("rational arithmetic overflow in " + std::to_string(a) +
                       " * " + std::to_string(b));
  return out;
}

}  // namespace detail

inline std::int64_t lcm_checked(std::int64_t a, std::int64_t b) {
  const std::int64_t g = std::gcd(a, b);
  return detail::checked_mul(a / g, b);
}

/// Least common integer multiple of two fractions:
/// lcm(p1/q1, p2/q2) = lcm(p1, p2) / gcd(q1, q2).
inline Fraction fraction_lcm(const Fraction& a, const Fraction& b) {
  if (a.num == 0 || b.num == 0)
    throw InvalidInput("fraction_lcm: arguments must be positive");
  return Fraction(lcm_checked(a.num, b.num), std::gcd(a.den, b.den));
}

/// Exact quotient a / b, which must come out integral.
inline std::int64_t fraction_ratio_integer(const Fraction& a, const Fraction& b) {
  // a/b = (a.num * b.den) / (a.den * b.num)
  const std::int64_t num = detail::checked_mul(a.num, b.den);
  const std::int64_t den = detail::checked_mul(a.den, b.num);
  if (den == 0 || num % den != 0)
    throw InvalidInput("fraction_ratio_integer: " + a.str() + " / " + b.str() +
                       " is not an integer");
  return num / den;
}

}  // namespace perdec
