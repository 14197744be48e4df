#pragma once

// Formal expansions at the boundary: L-series of densities, moments c_k in X = 1/(k+1), the
// reciprocal coefficients A_m of 1/c_k = (k+1) sum A_m (k+1)^{-m}, and the L-expansion of F.

#include "kepler_balance/lerch.hpp"
#include "kepler_balance/log_series.hpp"
#include "kepler_balance/rational.hpp"

#include <vector>

namespace kb {

/// Moment-side series: powers of X = 1/(k+1), log factor log(1/X) = log(k+1).
template <class T>
using InverseKSeries = LogSeries<T>;

/// a_j, j = 0..J, of phi_v(e^{-L}) = sum_j a_j L^j. Polynomial in v, hence exact for rational v.
std::vector<Rational> phi_v_L_coeffs(const Rational& v, int J);
std::vector<double> phi_v_L_coeffs(double v, int J);

/// phi_v as an L-series valid through L^J.
LogSeries<Rational> phi_v_L_series(const Rational& v, int J);
LogSeries<double> phi_v_L_series(double v, int J);

/// c_k = int_0^1 t^k phi dt from the L-series of phi, using
///   int_0^1 t^k L^p (log 1/L)^q dt = sum_l C(q,l) (-1)^{q-l} Gamma^{(q-l)}(p+1) X^{p+1} (log 1/X)^l.
/// order = -1 keeps everything the input determines (through X^{input order + 1}).
InverseKSeries<Rational> moment_expansion(const LogSeries<Rational>& phi_L, int order = -1);
InverseKSeries<double> moment_expansion(const LogSeries<double>& phi_L, int order = -1);

/// 1/c_k from c_k = X + ...; the result is X^{-1} sum_m A_m X^m. NormalizationError unless the
/// leading term is exactly X.
template <class T>
InverseKSeries<T> reciprocal_moments(const InverseKSeries<T>& c_exp, int order = -1) {
  const InverseKSeries<T> inv = reciprocal(c_exp);
  if (order < 0) return inv;
  if (order > inv.order()) {
    throw TruncationError("reciprocal_moments: input determines 1/c_k only through X^" + std::to_string(inv.order()));
  }
  return inv.truncated(order);
}

/// A_0..A_M read off a log-free 1/c_k series.
template <class T>
std::vector<T> A_coefficients(const InverseKSeries<T>& inv, int M) {
  if (M - 1 > inv.order()) throw TruncationError("A_coefficients: series too short for A_" + std::to_string(M));
  std::vector<T> A;
  for (int m = 0; m <= M; ++m) A.push_back(inv.coeff(m - 1, 0));
  return A;
}

/// Full chain a_j -> c_k -> A_m for phi_v, exact rational.
std::vector<Rational> phi_v_A_coefficients(const Rational& v, int M);

/// L-expansion of F(t) = sum_k (2k+1)/c_k t^k near t = 1 (n = 2) from the 1/c_k series `inv`.
/// Only the terms F actually determines are returned: negative powers of L and every term with a
/// log factor through L^{order}; the smooth remainder is left out. order = -1 uses the largest
/// order the input supports.
LogSeries<double> boundary_expansion_F(const InverseKSeries<double>& inv, int n = 2, int order = -1,
                                       const LerchContext& ctx = default_lerch_context());

/// f-germ L - (2A_1+3)/12 L^2 + (4A_1^2+6A_1+3-12A_2)/72 L^3 with A_1 = 0, A_2 = (1-v)/16.
/// Orders above 3 depend on a flat function; with zero_flat_part they are continued by matching
/// density_in_L(f) to the phi_v series term by term, otherwise CapabilityError.
LogSeries<Rational> germ_family_f(const Rational& v, int order = 3, bool zero_flat_part = false);
LogSeries<double> germ_family_f(double v, int order = 3, bool zero_flat_part = false);

}  // namespace kb
