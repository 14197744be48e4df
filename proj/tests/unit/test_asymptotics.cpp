#include "kepler_balance/asymptotics.hpp"
#include "kepler_balance/error.hpp"
#include "kepler_balance/profiles.hpp"

#include <doctest.h>

#include <cmath>

using namespace kb;

namespace {

// Taylor coefficients of e^{L/4}(cosh(s L/4) - sinh(s L/4)/s), s^2 = v, by direct convolution.
std::vector<double> phi_v_taylor(double v, int J) {
  std::vector<double> e(J + 1), h(J + 1, 0.0), out(J + 1, 0.0);
  double fact = 1.0;
  for (int j = 0; j <= J; ++j) {
    if (j > 0) fact *= j;
    e[j] = std::pow(0.25, j) / fact;
    // cosh part at even j: (s/4)^j/j! = v^{j/2}/4^j/j!; sinh/s part at odd j: v^{(j-1)/2}/4^j/j!
    h[j] = (j % 2 == 0 ? 1.0 : -1.0) * std::pow(v, j / 2) / std::pow(4.0, j) / fact;
  }
  for (int i = 0; i <= J; ++i)
    for (int j = 0; i + j <= J; ++j) out[i + j] += e[i] * h[j];
  return out;
}

InverseKSeries<Rational> x_series(std::initializer_list<Rational> coeffs, int order) {
  return InverseKSeries<Rational>::from_coefficients(std::vector<Rational>(coeffs), order, 1);
}

}  // namespace

TEST_CASE("phi_v L-coefficients") {
  const auto one = phi_v_L_coeffs(Rational(1), 3);
  CHECK(one == std::vector<Rational>{1, 0, 0, 0});
  for (int v : {-3, 0, 2, 9}) CHECK(phi_v_L_coeffs(Rational(v), 4)[1] == 0);
  CHECK(phi_v_L_coeffs(Rational(9), 2)[2] == Rational(1, 4));
  for (double v : {-2.5, 0.0, 0.7, 9.0, 16.0}) {
    const auto a = phi_v_L_coeffs(v, 10);
    const auto oracle = phi_v_taylor(v, 10);
    for (int j = 0; j <= 10; ++j) CHECK(a[j] == doctest::Approx(oracle[j]).epsilon(1e-13));
  }
}

TEST_CASE("moment expansion") {
  const auto unit = moment_expansion(LogSeries<Rational>::constant(Rational(1), 6));
  CHECK(unit.coeff(1) == 1);
  CHECK(unit.terms().size() == 1);
  const auto linear = moment_expansion(LogSeries<Rational>::monomial(1, 0, Rational(1), 6));
  CHECK(linear.valuation() == 2);
  CHECK(linear.coeff(2) == 1);
  CHECK_THROWS_AS(moment_expansion(LogSeries<Rational>::monomial(1, 1, Rational(1), 4)), CapabilityError);
  CHECK_THROWS_AS(moment_expansion(LogSeries<Rational>::constant(Rational(1), 3), 6), TruncationError);
}

TEST_CASE("phi_v moments re-expanded in X = 1/(k+1)") {
  // (16k+8)/(16k^2+24k+9-v) = X(16 - 8X)/(16 - 8X + (1-v)X^2)
  for (int v : {0, 1, 4, 9, 5}) {
    const int order = 10;
    const Rational vv(v);
    const auto num = x_series({1, Rational(-1, 2)}, order);
    const auto den = InverseKSeries<Rational>::from_coefficients({1, Rational(-1, 2), (Rational(1) - vv) / 16}, order, 0);
    const auto closed = (num * reciprocal(den)).truncated(order);
    const auto got = moment_expansion(phi_v_L_series(vv, order - 1));
    for (int p = 0; p <= order; ++p) CHECK(got.coeff(p) == closed.coeff(p));
  }
}

TEST_CASE("reciprocal moments and A coefficients") {
  const auto inv = reciprocal_moments(x_series({1}, 8));
  CHECK(A_coefficients(inv, 5) == std::vector<Rational>{1, 0, 0, 0, 0, 0});
  const Rational a1(3, 7);
  const auto generic = reciprocal_moments(x_series({1, a1, Rational(2, 5)}, 6));
  CHECK(A_coefficients(generic, 2)[1] == -a1);
  const auto c = x_series({1, Rational(1, 3), Rational(-2, 9), Rational(5)}, 7);
  const auto product = (c * reciprocal_moments(c)).truncated(4);
  CHECK(product.coeff(0) == 1);
  for (int p = 1; p <= 4; ++p) CHECK(product.coeff(p) == 0);
  CHECK_THROWS_AS(reciprocal_moments(x_series({2}, 5)), NormalizationError);
}

TEST_CASE("A coefficients of phi_v are geometric") {
  for (const Rational v : {Rational(0), Rational(1), Rational(4), Rational(9), Rational(7, 3), Rational(-5)}) {
    const auto A = phi_v_A_coefficients(v, 10);
    CHECK(A[0] == 1);
    CHECK(A[1] == 0);
    CHECK(A[2] == (Rational(1) - v) / 16);
    for (int m = 2; m <= 10; ++m) CHECK(A[m] * pow_int(Rational(2), m - 2) == A[2]);
  }
}

TEST_CASE("boundary expansion of F") {
  LogSeries<double> inv(6);
  inv.set(-1, 0, 1.0);
  const auto F = boundary_expansion_F(inv);
  CHECK(F.coeff(-3) == doctest::Approx(4.0));
  CHECK(F.coeff(-2) == doctest::Approx(3.0));
  CHECK(F.coeff(-1) == doctest::Approx(1.0));
  CHECK(F.max_log_power() == 0);

  const auto phi = reciprocal_moments(moment_expansion(phi_v_L_series(0.3, 8)));
  CHECK(boundary_expansion_F(phi).max_log_power() == 0);

  // (log(k+1))/(k+1)^3 = -X^3 log(1/X)
  LogSeries<double> with_log = inv;
  with_log.set(3, 1, -1.0);
  const auto G = boundary_expansion_F(with_log);
  CHECK(G.max_log_power() > 0);
  int lowest = 100;
  for (const auto& [key, value] : G.terms())
    if (key.second > 0) lowest = std::min(lowest, key.first);
  CHECK(lowest == 1);

  CHECK_THROWS_AS(boundary_expansion_F(inv, 3), CapabilityError);
}

TEST_CASE("germ family") {
  const auto f = germ_family_f(Rational(1));
  CHECK(f.coeff(1) == 1);
  CHECK(f.coeff(2) == Rational(-1, 4));
  CHECK(f.coeff(3) == Rational(1, 24));
  CHECK_THROWS_AS(germ_family_f(Rational(1), 4), CapabilityError);
  for (const Rational v : {Rational(0), Rational(2), Rational(9)}) {
    const auto g = germ_family_f(v, 8, true);
    const auto phi = density_in_L(g);
    const auto a = phi_v_L_coeffs(v, 7);
    for (int j = 0; j <= 7; ++j) CHECK(phi.coeff(j) == a[j]);
  }
  const auto d = germ_family_f(0.6, 3);
  CHECK(d.coeff(3) == doctest::Approx((3 - 12 * (1 - 0.6) / 16) / 72));
}
