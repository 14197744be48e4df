#include "kepler_balance/rational.hpp"

#include <boost/multiprecision/integer.hpp>

#include <cctype>

namespace kb {

namespace {

std::optional<BigInt> parse_integer(std::string_view digits) {
  if (digits.empty()) return std::nullopt;
  BigInt value = 0;
  for (char ch : digits) {
    if (!std::isdigit(static_cast<unsigned char>(ch))) return std::nullopt;
    value = value * 10 + (ch - '0');
  }
  return value;
}

std::optional<BigInt> isqrt_exact(const BigInt& x) {
  if (x < 0) return std::nullopt;
  BigInt root = boost::multiprecision::sqrt(x);
  if (root * root != x) return std::nullopt;
  return root;
}

}  // namespace

std::optional<Rational> parse_rational(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) return std::nullopt;

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    auto num = parse_rational(text.substr(0, slash));
    auto den = parse_rational(text.substr(slash + 1));
    if (!num || !den || *den == 0) return std::nullopt;
    return *num / *den;
  }

  bool negative = false;
  if (text.front() == '+' || text.front() == '-') {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }

  int exponent = 0;
  if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
    std::string_view exp_part = text.substr(e + 1);
    bool exp_negative = false;
    if (!exp_part.empty() && (exp_part.front() == '+' || exp_part.front() == '-')) {
      exp_negative = exp_part.front() == '-';
      exp_part.remove_prefix(1);
    }
    auto parsed = parse_integer(exp_part);
    if (!parsed || *parsed > 400) return std::nullopt;
    exponent = parsed->convert_to<int>() * (exp_negative ? -1 : 1);
    text = text.substr(0, e);
  }

  std::string digits;
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view frac = text.substr(dot + 1);
    digits = std::string(text.substr(0, dot)) + std::string(frac);
    exponent -= static_cast<int>(frac.size());
  } else {
    digits = std::string(text);
  }
  auto mantissa = parse_integer(digits);
  if (!mantissa) return std::nullopt;

  Rational value(*mantissa);
  value *= pow_int(Rational(10), exponent);
  return negative ? Rational(-value) : value;
}

std::optional<Rational> exact_sqrt(const Rational& x) {
  if (x < 0) return std::nullopt;
  auto num = isqrt_exact(boost::multiprecision::numerator(x));
  auto den = isqrt_exact(boost::multiprecision::denominator(x));
  if (!num || !den) return std::nullopt;
  return Rational(*num, *den);
}

std::string to_string(const Rational& x) {
  const BigInt num = boost::multiprecision::numerator(x);
  const BigInt den = boost::multiprecision::denominator(x);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

Rational pow_int(const Rational& base, int exponent) {
  Rational result = 1;
  Rational factor = exponent >= 0 ? base : Rational(1) / base;
  for (int e = exponent >= 0 ? exponent : -exponent; e > 0; e >>= 1) {
    if (e & 1) result *= factor;
    factor *= factor;
  }
  return result;
}

}  // namespace kb
