#pragma once

// Polylogarithm-type sums D_n(s)(t) = sum_{k>=1} t^k k^{-s} (log 1/k)^n = (d/ds)^n t Phi(t,s,1), and
// their expansions at t = 1 in L = log(1/t).

#include "kepler_balance/log_series.hpp"

#include <array>
#include <vector>

namespace kb {

/// Constants entering the boundary expansions: Stieltjes constants and the Laurent coefficients
/// c_{m,j} of Gamma(1-m-z) = (-1)^m/((m-1)! z) + sum_j c_{m,j} z^j / j!  (m >= 1), with
/// c_{0,j} = (-1)^j Gamma^{(j)}(1).
class LerchContext {
 public:
  static constexpr int kMaxIndex = 10;

  LerchContext(int max_m, int max_j);

  int max_m() const { return max_m_; }
  int max_j() const { return max_j_; }

  /// Stieltjes constant gamma_j in the standard convention zeta(s) = 1/(s-1) + sum (-1)^j gamma_j/j! (s-1)^j.
  double stieltjes(int j) const;
  double c(int m, int j) const;
  /// Gamma^{(n)}(x).
  double gamma_derivative(double x, int n) const;

  /// Largest scaled residual of the three-term recurrences linking the c_{m,j}.
  double recurrence_residual() const;

 private:
  int max_m_;
  int max_j_;
  std::array<double, 11> gamma_{};
  std::vector<std::vector<double>> c_;
};

LerchContext stieltjes_gamma_tables(int max_m = LerchContext::kMaxIndex, int max_j = LerchContext::kMaxIndex);
/// Shared read-only context with the full tables.
const LerchContext& default_lerch_context();

/// Direct summation of (d/ds)^n Phi(t,s,1) = sum_{k>=0} t^k (k+1)^{-s} (-log(k+1))^n, stopped by a
/// geometric tail bound at 1e-17 relative or 10^6 terms. Requires 0 <= t < 1.
double lerch_phi(double t, double s, int n_deriv);

/// Same quantity from the expansion at t = 1; CapabilityError for L >= 2 pi.
double lerch_phi_boundary(double t, double s, int n_deriv, const LerchContext& ctx = default_lerch_context());

/// Expansion of D_n(s) = t (d/ds)^n Phi(t,s,1) in L:
///   L^{s-1} sum_j singular[j] (log L)^j  +  sum_k regular[k] L^k,
/// convergent for |L| < 2 pi.
struct LerchExpansion {
  double s = 0.0;
  int n = 0;
  std::vector<double> singular;  // coefficients of L^{s-1} (log L)^j
  std::vector<double> regular;   // coefficients of L^k, k = 0..order
  double radius;

  double evaluate(double L) const;
  /// As a series in L with log(1/L) factors; integer s only.
  LogSeries<double> series() const;
};

LerchExpansion lerch_boundary_expansion(double s, int n_deriv, int order,
                                        const LerchContext& ctx = default_lerch_context());

/// Singular part only (no zeta sum); integer s may exceed the regular-part data.
LerchExpansion lerch_singular_part(double s, int n_deriv, const LerchContext& ctx = default_lerch_context());

/// Classical closed form for t Phi(t,m,1), integer m >= 1:
///   (-1)^m/(m-1)! L^{m-1} log L + sum'_k (-1)^k/k! zeta(m-k) L^k,
/// with zeta(1) at k = m-1 replaced by the harmonic number H_{m-1}. Requires 0 < L < 2 pi.
double lerch_integer_formula(int m, double L);

}  // namespace kb
