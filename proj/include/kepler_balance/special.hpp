#pragma once

// Special functions with derivatives in their main argument: Riemann zeta, Gamma, Stieltjes
// constants. Derivatives are carried as truncated Taylor jets.

#include <array>
#include <cstddef>

namespace kb {

/// Truncated Taylor expansion a_0 + a_1 e + ... + a_d e^d with d <= kMaxDegree.
class Jet {
 public:
  static constexpr int kMaxDegree = 11;

  explicit Jet(int degree = 0, double value = 0.0);
  /// The jet of the identity at x: x + e.
  static Jet variable(int degree, double x);

  int degree() const { return degree_; }
  double operator[](int i) const { return a_[static_cast<std::size_t>(i)]; }
  double& operator[](int i) { return a_[static_cast<std::size_t>(i)]; }
  /// i-th derivative, i! a_i.
  double derivative(int i) const;
  /// Replaces e by -e.
  Jet reflected() const;

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(const Jet& o);
  Jet& operator*=(double s);
  Jet& operator+=(double s);

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(Jet a, const Jet& b) { return a *= b; }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator+(Jet a, double s) { return a += s; }

 private:
  int degree_;
  std::array<double, kMaxDegree + 1> a_{};
};

Jet exp(const Jet& x);
Jet log(const Jet& x);
Jet reciprocal(const Jet& x);

/// Taylor jet of zeta(s + e) multiplied by exp(log_scale). s = 1 is a pole and is rejected.
/// The scale lets callers form zeta(s-k) L^k / k! for large k without overflow.
Jet zeta_jet(double s, int degree, double log_scale = 0.0);

/// n-th derivative of zeta at s.
double zeta_derivative(double s, int n);

/// Taylor jet of Gamma(x + e), x not a non-positive integer; built from log-Gamma and polygamma.
Jet gamma_jet(double x, int degree);

/// n-th derivative of Gamma at x.
double gamma_derivative(double x, int n);

/// Stieltjes constants gamma_0..gamma_10 as an embedded table (validated against
/// stieltjes_recompute to 1e-13 in the test suite).
const std::array<double, 11>& stieltjes_table();

/// Recomputes gamma_j (j <= 10) by Euler-Maclaurin summation in 50-digit arithmetic.
double stieltjes_recompute(int j);

/// H_m = 1 + 1/2 + ... + 1/m (H_0 = 0).
double harmonic(int m);

}  // namespace kb
