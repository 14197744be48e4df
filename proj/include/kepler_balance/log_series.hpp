#pragma once

// Truncated power-log expansions  sum_{k,j} b_{kj} X^k (log 1/X)^j  in a formal small variable X.
//
// The same container serves two roles:
//   * boundary expansions in L = log(1/t)             (log factor is log(1/L));
//   * moment expansions in X = 1/(k+1)                (log factor is log(k+1)).
// Powers k may be negative. A series is "valid through X^order": every term with k <= order is
// exact, everything above is unknown and dropped.

#include "kepler_balance/error.hpp"
#include "kepler_balance/rational.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace kb {

namespace detail {

inline bool is_zero(double v) { return v == 0.0; }
inline bool is_zero(const Rational& v) { return v == 0; }

inline bool is_integral(double v) { return std::abs(v - std::round(v)) <= 1e-12 * std::max(1.0, std::abs(v)); }
inline bool is_integral(const Rational& v) { return boost::multiprecision::denominator(v) == 1; }
inline int to_int(double v) { return static_cast<int>(std::lround(v)); }
inline int to_int(const Rational& v) { return boost::multiprecision::numerator(v).convert_to<int>(); }

}  // namespace detail

template <class T>
class LogSeries {
 public:
  using Key = std::pair<int, int>;  // (power of X, power of log 1/X)

  LogSeries() = default;
  explicit LogSeries(int order) : order_(order) {}

  static LogSeries constant(const T& c, int order) { return monomial(0, 0, c, order); }

  static LogSeries monomial(int k, int j, const T& c, int order) {
    LogSeries s(order);
    s.set(k, j, c);
    return s;
  }

  /// Log-free series from coefficients c[0], c[1], ... of X^0, X^1, ...
  static LogSeries from_coefficients(const std::vector<T>& c, int order, int first_power = 0) {
    LogSeries s(order);
    for (std::size_t i = 0; i < c.size(); ++i) s.set(first_power + static_cast<int>(i), 0, c[i]);
    return s;
  }

  int order() const { return order_; }

  /// Lowest power carrying a nonzero coefficient; order()+1 for the zero series.
  int valuation() const { return terms_.empty() ? order_ + 1 : terms_.begin()->first.first; }

  int max_log_power() const {
    int j = 0;
    for (const auto& [key, value] : terms_) j = std::max(j, key.second);
    return j;
  }

  bool is_log_free() const { return max_log_power() == 0; }
  bool is_zero() const { return terms_.empty(); }

  T coeff(int k, int j = 0) const {
    auto it = terms_.find({k, j});
    return it == terms_.end() ? T(0) : it->second;
  }

  /// Coefficients of X^from .. X^to with j = 0.
  std::vector<T> coefficients(int from, int to) const {
    std::vector<T> out;
    for (int k = from; k <= to; ++k) out.push_back(coeff(k, 0));
    return out;
  }

  void set(int k, int j, const T& value) {
    if (k > order_) return;
    if (detail::is_zero(value)) {
      terms_.erase({k, j});
    } else {
      terms_[{k, j}] = value;
    }
  }

  void add(int k, int j, const T& value) {
    if (k > order_ || detail::is_zero(value)) return;
    auto [it, inserted] = terms_.try_emplace({k, j}, value);
    if (!inserted) {
      it->second += value;
      if (detail::is_zero(it->second)) terms_.erase(it);
    }
  }

  const std::map<Key, T>& terms() const { return terms_; }

  LogSeries truncated(int order) const {
    LogSeries out(std::min(order, order_));
    for (const auto& [key, value] : terms_) out.set(key.first, key.second, value);
    return out;
  }

  /// Multiplies by X^shift.
  LogSeries shifted(int shift) const {
    LogSeries out(order_ + shift);
    for (const auto& [key, value] : terms_) out.set(key.first + shift, key.second, value);
    return out;
  }

  /// d/dX, using d/dX (log 1/X)^j = -j X^{-1} (log 1/X)^{j-1}.
  LogSeries derivative() const {
    LogSeries out(order_ - 1);
    for (const auto& [key, value] : terms_) {
      const auto [k, j] = key;
      if (k != 0) out.add(k - 1, j, value * T(k));
      if (j != 0) out.add(k - 1, j - 1, -value * T(j));
    }
    return out;
  }

  template <class U>
  LogSeries<U> cast() const {
    LogSeries<U> out(order_);
    for (const auto& [key, value] : terms_) out.set(key.first, key.second, static_cast<U>(to_double(value)));
    return out;
  }

  double evaluate(double x) const {
    const double log_inv = std::log(1.0 / x);
    double sum = 0.0;
    for (const auto& [key, value] : terms_) {
      sum += to_double(value) * std::pow(x, key.first) * std::pow(log_inv, key.second);
    }
    return sum;
  }

  LogSeries& operator+=(const LogSeries& other) {
    order_ = std::min(order_, other.order_);
    trim();
    for (const auto& [key, value] : other.terms_) add(key.first, key.second, value);
    return *this;
  }

  LogSeries& operator-=(const LogSeries& other) {
    order_ = std::min(order_, other.order_);
    trim();
    for (const auto& [key, value] : other.terms_) add(key.first, key.second, -value);
    return *this;
  }

  LogSeries& operator*=(const T& scalar) {
    if (detail::is_zero(scalar)) {
      terms_.clear();
      return *this;
    }
    for (auto& [key, value] : terms_) value *= scalar;
    return *this;
  }

  friend LogSeries operator+(LogSeries a, const LogSeries& b) { return a += b; }
  friend LogSeries operator-(LogSeries a, const LogSeries& b) { return a -= b; }
  friend LogSeries operator*(LogSeries a, const T& s) { return a *= s; }
  friend LogSeries operator*(const T& s, LogSeries a) { return a *= s; }
  friend LogSeries operator-(LogSeries a) { return a *= T(-1); }

  friend LogSeries operator*(const LogSeries& a, const LogSeries& b) {
    const int order = std::min(a.order_ + b.valuation(), b.order_ + a.valuation());
    LogSeries out(order);
    for (const auto& [ka, va] : a.terms_) {
      if (ka.first + b.valuation() > order) break;
      for (const auto& [kb_, vb] : b.terms_) {
        const int k = ka.first + kb_.first;
        if (k > order) break;
        out.add(k, ka.second + kb_.second, va * vb);
      }
    }
    return out;
  }

  std::string to_string(const std::string& var = "X", const std::string& log_name = "log(1/X)") const {
    std::ostringstream os;
    bool first = true;
    for (const auto& [key, value] : terms_) {
      if (!first) os << " + ";
      first = false;
      os << "(" << value << ")";
      if (key.first != 0) os << "*" << var << "^" << key.first;
      if (key.second != 0) os << "*" << log_name << "^" << key.second;
    }
    if (first) os << "0";
    os << " + O(" << var << "^" << order_ + 1 << ")";
    return os.str();
  }

 private:
  void trim() {
    for (auto it = terms_.begin(); it != terms_.end();) {
      it = it->first.first > order_ ? terms_.erase(it) : std::next(it);
    }
  }

  int order_ = 0;
  std::map<Key, T> terms_;
};

namespace detail {

/// Splits s = X^v (1 + u) with unit leading coefficient; returns u (valuation >= 1) and v.
template <class T>
std::pair<LogSeries<T>, int> split_unit(const LogSeries<T>& s, const char* op) {
  if (s.is_zero()) throw NormalizationError(std::string(op) + ": zero series");
  const int v = s.valuation();
  for (const auto& [key, value] : s.terms()) {
    if (key.first != v) break;
    if (key.second != 0) throw NormalizationError(std::string(op) + ": leading term carries a log factor");
  }
  if (s.coeff(v, 0) != T(1)) throw NormalizationError(std::string(op) + ": leading coefficient must be 1");
  LogSeries<T> u = s.shifted(-v);
  u.add(0, 0, T(-1));
  return {u, v};
}

}  // namespace detail

/// 1/s for s = X^v (1 + u).
template <class T>
LogSeries<T> reciprocal(const LogSeries<T>& s) {
  auto [u, v] = detail::split_unit(s, "reciprocal");
  const int inner_order = u.order();
  LogSeries<T> result = LogSeries<T>::constant(T(1), inner_order);
  LogSeries<T> power = result;
  const LogSeries<T> minus_u = -u;
  for (int i = 1; i <= std::max(0, inner_order); ++i) {
    power = (power * minus_u).truncated(inner_order);
    if (power.is_zero()) break;
    result += power;
  }
  return result.shifted(-v);
}

/// s^alpha for s = X^v (1 + u); requires v*alpha to be an integer.
template <class T>
LogSeries<T> power(const LogSeries<T>& s, const T& alpha) {
  auto [u, v] = detail::split_unit(s, "power");
  const T shift = alpha * T(v);
  if (!detail::is_integral(shift)) throw NormalizationError("power: fractional power of X");
  const int inner_order = u.order();
  LogSeries<T> result = LogSeries<T>::constant(T(1), inner_order);
  LogSeries<T> power_u = result;
  T binom = T(1);
  for (int i = 1; i <= std::max(0, inner_order); ++i) {
    binom = binom * (alpha - T(i - 1)) / T(i);
    power_u = (power_u * u).truncated(inner_order);
    if (power_u.is_zero()) break;
    result += power_u * binom;
  }
  return result.shifted(detail::to_int(shift));
}

/// exp(s) for s with positive valuation.
template <class T>
LogSeries<T> exp(const LogSeries<T>& s) {
  if (s.valuation() < 1) throw NormalizationError("exp: argument must vanish at X = 0");
  const int order = s.order();
  LogSeries<T> result = LogSeries<T>::constant(T(1), order);
  LogSeries<T> term = result;
  for (int i = 1; i <= std::max(0, order); ++i) {
    term = (term * s).truncated(order);
    term *= T(1) / T(i);
    if (term.is_zero()) break;
    result += term;
  }
  return result;
}

/// f(g(X)) for a log-free power series f and a log-free g with positive valuation.
template <class T>
LogSeries<T> compose(const LogSeries<T>& f, const LogSeries<T>& g) {
  if (!f.is_log_free() || !g.is_log_free()) throw CapabilityError("compose: log terms not supported");
  if (f.valuation() < 0) throw CapabilityError("compose: outer series has negative powers");
  const int vg = g.valuation();
  if (vg < 1) throw NormalizationError("compose: inner series must vanish at X = 0");
  const int order = std::min(g.order(), (f.order() + 1) * vg - 1);
  LogSeries<T> result(order);
  LogSeries<T> power_g = LogSeries<T>::constant(T(1), order);
  for (int i = 0; i <= f.order(); ++i) {
    if (i > 0) power_g = (power_g * g).truncated(order);
    const T c = f.coeff(i, 0);
    if (!detail::is_zero(c)) result += power_g * c;
    if (power_g.is_zero()) break;
  }
  return result;
}

}  // namespace kb
