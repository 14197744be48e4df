#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <string>
#include <string_view>

namespace kb {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline double to_double(double x) { return x; }
inline double to_double(const Rational& x) { return x.convert_to<double>(); }

/// Parses "3", "-7/16", "0.25", "1e-3" exactly. Returns nullopt on malformed input.
std::optional<Rational> parse_rational(std::string_view text);

/// Exact square root of a non-negative rational when both numerator and denominator are squares.
std::optional<Rational> exact_sqrt(const Rational& x);

/// "p/q" or "p" when q == 1.
std::string to_string(const Rational& x);

Rational pow_int(const Rational& base, int exponent);

}  // namespace kb
