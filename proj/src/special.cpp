#include "kepler_balance/special.hpp"

#include "kepler_balance/error.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/bernoulli.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/factorials.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/polygamma.hpp>
#include <boost/math/special_functions/sin_pi.hpp>
#include <boost/math/special_functions/cos_pi.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace kb {

namespace {

constexpr double kPi = boost::math::constants::pi<double>();

void check_degree(int degree) {
  if (degree < 0 || degree > Jet::kMaxDegree) {
    throw CapabilityError("jet degree " + std::to_string(degree) + " outside [0, " +
                          std::to_string(Jet::kMaxDegree) + "]");
  }
}

double polygamma_any(int m, double x) {
  if (m == 0) return boost::math::digamma(x);
  return boost::math::polygamma(m, x);
}

/// Jet of log Gamma(x + e) (of |Gamma| for negative x).
Jet lgamma_jet(double x, int degree) {
  Jet out(degree, boost::math::lgamma(x));
  double factorial = 1.0;
  for (int m = 1; m <= degree; ++m) {
    factorial *= m;
    out[m] = polygamma_any(m - 1, x) / factorial;
  }
  return out;
}

/// Euler-Maclaurin summation of zeta(s + e), valid for s > -1/2, s != 1.
Jet zeta_jet_euler_maclaurin(double s, int degree) {
  constexpr int kTerms = 16;
  constexpr int kBernoulli = 14;
  const Jet var = Jet::variable(degree, s);

  Jet sum(degree, 0.0);
  for (int k = 2; k < kTerms; ++k) sum += exp(var * (-std::log(static_cast<double>(k))));
  sum += 1.0;

  const double log_n = std::log(static_cast<double>(kTerms));
  // N^{1-s} / (s - 1)
  Jet shifted = var;
  shifted += -1.0;
  sum += exp((var * -1.0 + 1.0) * log_n) * reciprocal(shifted);
  // N^{-s} / 2
  const Jet n_pow = exp(var * -log_n);
  sum += n_pow * 0.5;

  // sum_i B_{2i}/(2i)! (s)_{2i-1} N^{-s-2i+1}
  Jet rising(degree, 1.0);
  double factorial = 1.0;
  for (int i = 1; i <= kBernoulli; ++i) {
    // rising = (s)(s+1)...(s+2i-2)
    if (i == 1) {
      rising = var;
    } else {
      rising *= var + static_cast<double>(2 * i - 3);
      rising *= var + static_cast<double>(2 * i - 2);
    }
    factorial *= (2.0 * i - 1.0) * (2.0 * i);
    const double coeff = boost::math::bernoulli_b2n<double>(i) / factorial;
    sum += rising * n_pow * (coeff * std::pow(static_cast<double>(kTerms), 1.0 - 2.0 * i));
  }
  return sum;
}

}  // namespace

Jet::Jet(int degree, double value) : degree_(degree) {
  check_degree(degree);
  a_[0] = value;
}

Jet Jet::variable(int degree, double x) {
  Jet j(degree, x);
  if (degree >= 1) j[1] = 1.0;
  return j;
}

double Jet::derivative(int i) const {
  double f = 1.0;
  for (int k = 2; k <= i; ++k) f *= k;
  return a_[static_cast<std::size_t>(i)] * f;
}

Jet Jet::reflected() const {
  Jet out = *this;
  for (int i = 1; i <= degree_; i += 2) out[i] = -out[i];
  return out;
}

Jet& Jet::operator+=(const Jet& o) {
  degree_ = std::min(degree_, o.degree_);
  for (int i = 0; i <= degree_; ++i) (*this)[i] += o[i];
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  degree_ = std::min(degree_, o.degree_);
  for (int i = 0; i <= degree_; ++i) (*this)[i] -= o[i];
  return *this;
}

Jet& Jet::operator*=(const Jet& o) {
  const int d = std::min(degree_, o.degree_);
  Jet out(d);
  for (int k = 0; k <= d; ++k) {
    double c = 0.0;
    for (int i = 0; i <= k; ++i) c += (*this)[i] * o[k - i];
    out[k] = c;
  }
  return *this = out;
}

Jet& Jet::operator*=(double s) {
  for (int i = 0; i <= degree_; ++i) (*this)[i] *= s;
  return *this;
}

Jet& Jet::operator+=(double s) {
  a_[0] += s;
  return *this;
}

Jet exp(const Jet& x) {
  Jet out(x.degree(), std::exp(x[0]));
  for (int k = 1; k <= x.degree(); ++k) {
    double c = 0.0;
    for (int i = 1; i <= k; ++i) c += i * x[i] * out[k - i];
    out[k] = c / k;
  }
  return out;
}

Jet log(const Jet& x) {
  if (!(x[0] > 0.0)) throw DomainError("log of a jet with non-positive value");
  Jet out(x.degree(), std::log(x[0]));
  for (int k = 1; k <= x.degree(); ++k) {
    double c = 0.0;
    for (int i = 1; i < k; ++i) c += i * out[i] * x[k - i];
    out[k] = (x[k] - c / k) / x[0];
  }
  return out;
}

Jet reciprocal(const Jet& x) {
  if (x[0] == 0.0) throw DomainError("reciprocal of a jet with zero value");
  Jet out(x.degree(), 1.0 / x[0]);
  for (int k = 1; k <= x.degree(); ++k) {
    double c = 0.0;
    for (int i = 1; i <= k; ++i) c += x[i] * out[k - i];
    out[k] = -c / x[0];
  }
  return out;
}

Jet zeta_jet(double s, int degree, double log_scale) {
  check_degree(degree);
  if (s == 1.0) throw DomainError("zeta has a pole at s = 1");
  if (s > -0.5) {
    Jet z = zeta_jet_euler_maclaurin(s, degree);
    return z * std::exp(log_scale);
  }
  // zeta(s) = 2^s pi^{s-1} sin(pi s / 2) Gamma(1-s) zeta(1-s), assembled in log-magnitude form.
  const double x = 1.0 - s;
  Jet magnitude = Jet::variable(degree, s) * std::log(2.0);
  magnitude += (Jet::variable(degree, s) + (-1.0)) * std::log(kPi);
  magnitude += lgamma_jet(x, degree).reflected();
  magnitude += log_scale;

  Jet sine(degree);
  const double sin_a = boost::math::sin_pi(0.5 * s);
  const double cos_a = boost::math::cos_pi(0.5 * s);
  const double cycle[4] = {sin_a, cos_a, -sin_a, -cos_a};
  double scale = 1.0;
  for (int i = 0; i <= degree; ++i) {
    if (i > 0) scale *= 0.5 * kPi / i;
    sine[i] = cycle[i % 4] * scale;
  }
  return exp(magnitude) * sine * zeta_jet_euler_maclaurin(x, degree).reflected();
}

double zeta_derivative(double s, int n) { return zeta_jet(s, n).derivative(n); }

Jet gamma_jet(double x, int degree) {
  check_degree(degree);
  if (x <= 0.0 && x == std::floor(x)) throw DomainError("Gamma has a pole at x = " + std::to_string(x));
  const double sign = (x > 0.0 || static_cast<long>(std::floor(x)) % 2 == 0) ? 1.0 : -1.0;
  return exp(lgamma_jet(x, degree)) * sign;
}

double gamma_derivative(double x, int n) { return gamma_jet(x, n).derivative(n); }

const std::array<double, 11>& stieltjes_table() {
  static const std::array<double, 11> table = {
      0.57721566490153286061,   -0.072815845483676724861, -0.0096903631928723184845,
      0.0020538344203033458662, 0.0023253700654673000575, 0.00079332381730106270175,
      -0.00023876934543019960987, -0.00052728956705775104607, -0.00035212335380303950960,
      -3.4394774418088048178e-05, 0.00020533281490906479468,
  };
  return table;
}

double stieltjes_recompute(int j) {
  using boost::multiprecision::cpp_bin_float_50;
  using Real = cpp_bin_float_50;
  if (j < 0 || j > 10) throw CapabilityError("Stieltjes constants available for j <= 10");

  constexpr int kTerms = 20;
  constexpr int kBernoulli = 24;
  Real sum = 0;
  for (int k = 2; k < kTerms; ++k) sum += pow(log(Real(k)), j) / k;
  if (j == 0) sum += 1;

  const Real log_n = log(Real(kTerms));
  sum -= pow(log_n, j + 1) / (j + 1);
  sum += pow(log_n, j) / (2 * kTerms);

  // f(x) = (log x)^j / x, f^{(m)}(x) = x^{-1-m} P_m(log x), P_{m+1} = -(m+1) P_m + P_m'.
  std::vector<Real> poly(static_cast<std::size_t>(j) + 1, Real(0));
  poly[static_cast<std::size_t>(j)] = 1;
  auto eval_poly = [&](const Real& y) {
    Real acc = 0;
    for (std::size_t i = poly.size(); i-- > 0;) acc = acc * y + poly[i];
    return acc;
  };
  auto advance = [&](int m) {
    std::vector<Real> next(poly.size(), Real(0));
    for (std::size_t i = 0; i < poly.size(); ++i) {
      next[i] -= Real(m + 1) * poly[i];
      if (i > 0) next[i - 1] += Real(static_cast<int>(i)) * poly[i];
    }
    poly = std::move(next);
  };

  int current = 0;
  Real factorial = 1;
  for (int i = 1; i <= kBernoulli; ++i) {
    const int m = 2 * i - 1;
    while (current < m) advance(current++);
    factorial *= Real(2 * i - 1) * Real(2 * i);
    const Real deriv = eval_poly(log_n) * pow(Real(kTerms), -1 - m);
    sum -= boost::math::bernoulli_b2n<Real>(i) / factorial * deriv;
  }
  return sum.convert_to<double>();
}

double harmonic(int m) {
  double h = 0.0;
  for (int i = 1; i <= m; ++i) h += 1.0 / i;
  return h;
}

}  // namespace kb
