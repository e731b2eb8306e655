#pragma once

// Exact integers and rationals used everywhere a probability or a cocycle
// value is computed. No floating point enters these paths.

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "rnc/error.hpp"

namespace rnc {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline BigInt numerator_of(const Rational& r) {
  return boost::multiprecision::numerator(r);
}
inline BigInt denominator_of(const Rational& r) {
  return boost::multiprecision::denominator(r);
}

inline BigInt pow2_int(std::uint64_t e) {
  BigInt one = 1;
  return one << static_cast<unsigned>(e);
}

/// 2^e for any signed exponent.
inline Rational pow2(std::int64_t e) {
  if (e >= 0) return Rational(pow2_int(static_cast<std::uint64_t>(e)));
  return Rational(BigInt(1), pow2_int(static_cast<std::uint64_t>(-e)));
}

/// b^e for a positive integer base and signed exponent.
inline Rational ipow(std::uint64_t base, std::int64_t e) {
  BigInt p = boost::multiprecision::pow(BigInt(base),
                                        static_cast<unsigned>(e < 0 ? -e : e));
  return e >= 0 ? Rational(p) : Rational(BigInt(1), p);
}

/// "n/d", or "n" when the denominator is 1.
inline std::string to_string(const Rational& r) {
  const BigInt den = denominator_of(r);
  if (den == 1) return numerator_of(r).str();
  return numerator_of(r).str() + "/" + den.str();
}

/// Parses "a", "-a" or "a/b" with decimal integers.
inline Rational parse_rational(std::string_view text) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
  };
  auto parse_int = [&](std::string_view s) {
    s = trim(s);
    std::size_t start = (!s.empty() && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
    if (s.size() == start) throw invalid_parameter("empty integer in rational");
    for (std::size_t i = start; i < s.size(); ++i) {
      if (s[i] < '0' || s[i] > '9')
        throw invalid_parameter("malformed rational: '" + std::string(s) + "'");
    }
    return BigInt(std::string(s));
  };
  text = trim(text);
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_int(text));
  BigInt den = parse_int(text.substr(slash + 1));
  if (den == 0) throw invalid_parameter("zero denominator in rational");
  return Rational(parse_int(text.substr(0, slash)), den);
}

/// Decimal expansion rounded half-up to `digits` fractional digits.
inline std::string to_decimal_string(const Rational& r, unsigned digits = 18) {
  const bool negative = r < 0;
  const Rational a = negative ? Rational(-r) : r;
  const BigInt scale = boost::multiprecision::pow(BigInt(10), digits);
  const BigInt num = numerator_of(a) * scale;
  const BigInt den = denominator_of(a);
  BigInt scaled = num / den;
  if ((num % den) * 2 >= den) ++scaled;
  std::string s = scaled.str();
  if (digits > 0) {
    if (s.size() <= digits) s.insert(0, digits + 1 - s.size(), '0');
    s.insert(s.size() - digits, ".");
  }
  return (negative && scaled != 0 ? "-" : "") + s;
}

/// Approximate log2 of a positive integer, good to double precision.
inline double log2_of(const BigInt& n) {
  if (n <= 0) return -HUGE_VAL;
  const auto top = static_cast<std::int64_t>(boost::multiprecision::msb(n));
  if (top < 62) return std::log2(static_cast<double>(n.convert_to<std::uint64_t>()));
  const std::int64_t shift = top - 60;
  const BigInt head = n >> static_cast<unsigned>(shift);
  return std::log2(static_cast<double>(head.convert_to<std::uint64_t>())) +
         static_cast<double>(shift);
}

inline double log2_of(const Rational& r) {
  return log2_of(numerator_of(r)) - log2_of(denominator_of(r));
}

/// Exponent e with n == base^e, if n is a nonnegative power of base.
inline std::optional<std::int64_t> exact_power(BigInt n, std::uint64_t base) {
  if (base < 2 || n <= 0) return std::nullopt;
  std::int64_t e = 0;
  while (n % base == 0) {
    n /= base;
    ++e;
  }
  if (n != 1) return std::nullopt;
  return e;
}

/// Exponent e with r == base^e exactly (e may be negative).
inline std::optional<std::int64_t> exact_log(const Rational& r, std::uint64_t base) {
  if (r <= 0) return std::nullopt;
  const BigInt num = numerator_of(r);
  const BigInt den = denominator_of(r);
  if (den == 1) return exact_power(num, base);
  if (num == 1) {
    auto e = exact_power(den, base);
    if (e) return -*e;
  }
  return std::nullopt;
}

}  // namespace rnc
