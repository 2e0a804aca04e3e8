#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>
#include <string_view>

#include "bmcarpet/errors.hpp"

namespace bmcarpet {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Rational make_rational(const BigInt& num, const BigInt& den) {
  if (den == 0) throw DomainError("rational with zero denominator");
  return Rational(num, den);
}

// Exact integer power. Used for n^k, m^k where int64 may not be enough.
inline BigInt big_pow(std::int64_t base, unsigned exponent) {
  BigInt r = 1;
  for (unsigned i = 0; i < exponent; ++i) r *= base;
  return r;
}

// Checked int64 power; throws CapExceeded on overflow past 2^62.
inline std::int64_t checked_pow(std::int64_t base, unsigned exponent) {
  constexpr std::int64_t kLimit = std::int64_t{1} << 62;
  std::int64_t r = 1;
  for (unsigned i = 0; i < exponent; ++i) {
    if (r > kLimit / base)
      throw CapExceeded("integer power exceeds 2^62", static_cast<long double>(base) * r,
                        static_cast<long double>(kLimit));
    r *= base;
  }
  return r;
}

inline BigInt floor_of(const Rational& q) {
  using boost::multiprecision::denominator;
  using boost::multiprecision::numerator;
  BigInt num = numerator(q);
  BigInt den = denominator(q);
  BigInt quot = num / den;  // truncates toward zero
  if (num < 0 && quot * den != num) quot -= 1;
  return quot;
}

// "p/q" in lowest terms; integers print as "p/1" so the format is uniform.
inline std::string to_string(const Rational& q) {
  using boost::multiprecision::denominator;
  using boost::multiprecision::numerator;
  return numerator(q).str() + "/" + denominator(q).str();
}

inline Rational parse_rational(std::string_view text) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
  };
  auto parse_int = [&](std::string_view s) -> BigInt {
    s = trim(s);
    if (s.empty()) throw ParseError("empty integer in rational");
    std::size_t start = (s.front() == '-' || s.front() == '+') ? 1 : 0;
    if (start == s.size()) throw ParseError("bad integer in rational: " + std::string(s));
    for (std::size_t i = start; i < s.size(); ++i)
      if (s[i] < '0' || s[i] > '9') throw ParseError("bad integer in rational: " + std::string(s));
    return BigInt(std::string(s));
  };
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_int(text));
  BigInt num = parse_int(text.substr(0, slash));
  BigInt den = parse_int(text.substr(slash + 1));
  if (den == 0) throw ParseError("zero denominator: " + std::string(text));
  return Rational(num, den);
}

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

}  // namespace bmcarpet
