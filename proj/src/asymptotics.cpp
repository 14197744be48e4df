#include "kepler_balance/asymptotics.hpp"

#include "kepler_balance/error.hpp"
#include "kepler_balance/profiles.hpp"

#include <fmt/format.h>

#include <cmath>
#include <string>
#include <type_traits>

namespace kb {

namespace {

template <class T>
T binom(int n, int k) {
  if (k < 0 || k > n) return T(0);
  T r(1);
  for (int i = 1; i <= k; ++i) r = r * T(n - k + i) / T(i);
  return r;
}

template <class T>
T factorial(int n) {
  T r(1);
  for (int i = 2; i <= n; ++i) r *= T(i);
  return r;
}

template <class T>
std::vector<T> phi_v_coeffs_impl(const T& v, int J) {
  if (J < 0) throw DomainError("phi_v_L_coeffs: J must be >= 0");
  std::vector<T> a;
  T scale(1);  // 4^j j!
  for (int j = 0; j <= J; ++j) {
    if (j > 0) scale *= T(4 * j);
    T sum(0);
    T vp(1);
    for (int i = 0; 2 * i <= j; ++i) {
      sum += (binom<T>(j, 2 * i) - binom<T>(j, 2 * i + 1)) * vp;
      vp *= v;
    }
    a.push_back(sum / scale);
  }
  return a;
}

template <class T>
InverseKSeries<T> moment_expansion_impl(const LogSeries<T>& phi_L, int order) {
  if (phi_L.is_zero()) throw NormalizationError("moment_expansion: zero density series");
  const int available = phi_L.order() + 1;
  if (order < 0) order = available;
  if (order > available)
    throw TruncationError(fmt::format("moment_expansion: density known through L^{}, moments only through X^{}",
                                      phi_L.order(), available));
  InverseKSeries<T> out(order);
  for (const auto& [key, a] : phi_L.terms()) {
    const auto [p, q] = key;
    if (p < 0) throw CapabilityError("moment_expansion: density series with negative powers of L");
    for (int l = 0; l <= q; ++l) {
      T g;
      if (q - l == 0) {
        g = factorial<T>(p);
      } else if constexpr (std::is_same_v<T, double>) {
        g = default_lerch_context().gamma_derivative(p + 1.0, q - l);
      } else {
        throw CapabilityError("moment_expansion: log terms need Gamma derivatives, not available in exact arithmetic");
      }
      const T sign = (q - l) % 2 == 0 ? T(1) : T(-1);
      out.add(p + 1, l, a * binom<T>(q, l) * sign * g);
    }
  }
  return out;
}

template <class T>
LogSeries<T> germ_impl(const T& v, int order, bool zero_flat_part) {
  if (order < 1) throw DomainError("germ_family_f: order must be >= 1");
  if (order > 3 && !zero_flat_part)
    throw CapabilityError("germ_family_f: coefficients beyond L^3 depend on a flat function; pass zero_flat_part");
  const T A1(0);
  const T A2 = (T(1) - v) / T(16);
  LogSeries<T> f(order);
  f.set(1, 0, T(1));
  f.set(2, 0, -(T(2) * A1 + T(3)) / T(12));
  f.set(3, 0, (T(4) * A1 * A1 + T(6) * A1 + T(3) - T(12) * A2) / T(72));
  if (order <= 3) return f;
  const std::vector<T> a = phi_v_coeffs_impl(v, order - 1);
  for (int j = 3; j + 1 <= order; ++j) {
    // The L^j coefficient of the density is (j+1)(3-j) b_{j+1} plus lower terms. At j = 3 the
    // coefficient b_4 drops out: it is the free parameter of the flat part and is set to zero.
    if (j == 3) continue;
    LogSeries<T> trial = f.truncated(j + 1);
    trial.set(j + 1, 0, T(0));
    const T d0 = density_in_L(trial, j).coeff(j, 0);
    trial.set(j + 1, 0, T(1));
    const T d1 = density_in_L(trial, j).coeff(j, 0);
    f.set(j + 1, 0, (a[static_cast<std::size_t>(j)] - d0) / (d1 - d0));
  }
  return f;
}

}  // namespace

std::vector<Rational> phi_v_L_coeffs(const Rational& v, int J) { return phi_v_coeffs_impl(v, J); }
std::vector<double> phi_v_L_coeffs(double v, int J) { return phi_v_coeffs_impl(v, J); }

LogSeries<Rational> phi_v_L_series(const Rational& v, int J) {
  return LogSeries<Rational>::from_coefficients(phi_v_L_coeffs(v, J), J);
}
LogSeries<double> phi_v_L_series(double v, int J) { return LogSeries<double>::from_coefficients(phi_v_L_coeffs(v, J), J); }

InverseKSeries<Rational> moment_expansion(const LogSeries<Rational>& phi_L, int order) {
  return moment_expansion_impl(phi_L, order);
}
InverseKSeries<double> moment_expansion(const LogSeries<double>& phi_L, int order) {
  return moment_expansion_impl(phi_L, order);
}

std::vector<Rational> phi_v_A_coefficients(const Rational& v, int M) {
  if (M < 0) throw DomainError("phi_v_A_coefficients: M must be >= 0");
  // 1/c_k through X^{M-1} needs c_k through X^{M+1}, i.e. the density through L^M.
  const auto inv = reciprocal_moments(moment_expansion(phi_v_L_series(v, M)));
  return A_coefficients(inv, M);
}

LogSeries<double> boundary_expansion_F(const InverseKSeries<double>& inv, int n, int order, const LerchContext& ctx) {
  if (n != 2) throw CapabilityError(fmt::format("boundary_expansion_F: only n = 2 is implemented (got n = {})", n));
  if (inv.is_zero()) throw NormalizationError("boundary_expansion_F: zero 1/c_k series");
  // (2k+1)/c_k = (2 X^{-1} - 1) * inv
  LogSeries<double> counts(inv.order() + 8);
  counts.set(-1, 0, 2.0);
  counts.set(0, 0, -1.0);
  const LogSeries<double> gamma = counts * inv;
  const int available = gamma.order() - 1;
  if (order < 0) order = available;
  if (order > available)
    throw TruncationError(
        fmt::format("boundary_expansion_F: 1/c_k known through X^{}, F only through L^{}", inv.order(), available));

  // sum_k t^k X^p (log 1/X)^j = t^{-1} (-1)^j D_j(p), D_j(p) = sum_k t^k k^{-p} (log 1/k)^j.
  const int work = order + 4;
  LogSeries<double> acc(work);
  for (const auto& [key, g] : gamma.terms()) {
    const auto [p, j] = key;
    if (p - 1 > work) continue;
    const LerchExpansion e = lerch_singular_part(static_cast<double>(p), j, ctx);
    const double sign = j % 2 == 0 ? 1.0 : -1.0;
    for (std::size_t i = 0; i < e.singular.size(); ++i) {
      // (log L)^i = (-1)^i (log 1/L)^i
      const double li = i % 2 == 0 ? 1.0 : -1.0;
      acc.add(p - 1, static_cast<int>(i), g * sign * li * e.singular[i]);
    }
  }
  const LogSeries<double> full = (exp_linear(1.0, work + 4) * acc).truncated(order);
  LogSeries<double> out(order);
  for (const auto& [key, value] : full.terms())
    if (key.first < 0 || key.second > 0) out.set(key.first, key.second, value);
  return out;
}

LogSeries<Rational> germ_family_f(const Rational& v, int order, bool zero_flat_part) {
  return germ_impl(v, order, zero_flat_part);
}
LogSeries<double> germ_family_f(double v, int order, bool zero_flat_part) { return germ_impl(v, order, zero_flat_part); }

}  // namespace kb
