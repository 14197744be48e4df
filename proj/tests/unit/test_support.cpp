#include "kepler_balance/error.hpp"
#include "kepler_balance/log_series.hpp"
#include "kepler_balance/ode.hpp"
#include "kepler_balance/quadrature.hpp"
#include "kepler_balance/rational.hpp"
#include "kepler_balance/special.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace kb;

TEST_CASE("rational parsing") {
  CHECK(*parse_rational("3/10") == Rational(3, 10));
  CHECK(*parse_rational("0.25") == Rational(1, 4));
  CHECK(*parse_rational("-1e-2") == Rational(-1, 100));
  CHECK(*parse_rational(" 7 ") == Rational(7));
  CHECK_FALSE(parse_rational("abc"));
  CHECK_FALSE(parse_rational("1/0"));
  CHECK_FALSE(parse_rational(""));
  CHECK(*exact_sqrt(Rational(9, 4)) == Rational(3, 2));
  CHECK_FALSE(exact_sqrt(Rational(2)));
  CHECK(to_string(Rational(-3, 16)) == "-3/16");
  CHECK(pow_int(Rational(2), -3) == Rational(1, 8));
}

TEST_CASE("series arithmetic") {
  const auto one_plus_x = LogSeries<Rational>::from_coefficients({1, 1}, 8);
  const auto inv = reciprocal(one_plus_x);
  for (int k = 0; k <= 8; ++k) CHECK(inv.coeff(k) == (k % 2 == 0 ? 1 : -1));
  const auto prod = (inv * one_plus_x).truncated(8);
  CHECK(prod.coeff(0) == 1);
  CHECK(prod.terms().size() == 1);
  // d/dX [X log(1/X)] = log(1/X) - 1
  const auto d = LogSeries<double>::monomial(1, 1, 1.0, 5).derivative();
  CHECK(d.coeff(0, 1) == 1.0);
  CHECK(d.coeff(0, 0) == -1.0);
  const auto e = exp(LogSeries<double>::monomial(1, 0, 1.0, 6));
  CHECK(e.coeff(3) == doctest::Approx(1.0 / 6));
  // (1 + X)^{1/2} squared
  const auto root = power(LogSeries<double>::from_coefficients({1.0, 1.0}, 6), 0.5);
  const auto sq = (root * root).truncated(6);
  CHECK(sq.coeff(1) == doctest::Approx(1.0));
  for (int k = 2; k <= 6; ++k) CHECK(std::abs(sq.coeff(k)) < 1e-15);
  CHECK_THROWS_AS(reciprocal(LogSeries<double>(4)), NormalizationError);
  const auto shifted = LogSeries<double>::monomial(1, 0, 1.0, 4);
  CHECK(compose(LogSeries<double>::from_coefficients({0.0, 1.0, 1.0}, 4), shifted).coeff(2) == 1.0);
}

TEST_CASE("special functions") {
  CHECK(zeta_derivative(2.0, 0) == doctest::Approx(std::numbers::pi * std::numbers::pi / 6).epsilon(1e-15));
  CHECK(zeta_derivative(0.0, 0) == doctest::Approx(-0.5).epsilon(1e-14));
  CHECK(zeta_derivative(0.0, 1) == doctest::Approx(-0.5 * std::log(2 * std::numbers::pi)).epsilon(1e-14));
  CHECK(zeta_derivative(-1.0, 0) == doctest::Approx(-1.0 / 12).epsilon(1e-14));
  CHECK_THROWS(zeta_jet(1.0, 2));
  CHECK(gamma_derivative(1.0, 0) == doctest::Approx(1.0));
  CHECK(gamma_derivative(1.0, 1) == doctest::Approx(-std::numbers::egamma).epsilon(1e-14));
  CHECK(gamma_derivative(1.0, 2) == doctest::Approx(std::numbers::egamma * std::numbers::egamma + std::numbers::pi * std::numbers::pi / 6).epsilon(1e-13));
  CHECK(harmonic(0) == 0.0);
  CHECK(harmonic(3) == doctest::Approx(11.0 / 6));
  const Jet x = Jet::variable(6, 0.7);
  const Jet back = log(exp(x));
  CHECK(back[0] == doctest::Approx(0.7));
  CHECK(back[1] == doctest::Approx(1.0));
  for (int i = 2; i <= 6; ++i) CHECK(std::abs(back[i]) < 1e-14);
  const Jet r = reciprocal(x) * x;
  CHECK(r[0] == doctest::Approx(1.0));
  CHECK(std::abs(r[3]) < 1e-14);
}

TEST_CASE("tanh-sinh quadrature with endpoint singularities") {
  const auto& rule = TanhSinh::instance();
  const auto a = rule.integrate([](const QuadNode& n) { return std::exp(-0.5 * n.log_t); }, 1e-14);
  CHECK(a.value == doctest::Approx(2.0).epsilon(1e-13));
  const auto b = rule.integrate([](const QuadNode& n) { return n.log_t; }, 1e-14);
  CHECK(b.value == doctest::Approx(-1.0).epsilon(1e-13));
  const auto c = rule.integrate([](const QuadNode& n) { return std::exp(-0.5 * std::log(n.omt)); }, 1e-14);
  CHECK(c.value == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("Dormand-Prince integration, dense output and events") {
  OdeOptions opt;
  opt.rtol = opt.atol = 1e-12;
  const auto rk = make_dormand_prince<1>([](double, const std::array<double, 1>& y) { return std::array<double, 1>{y[0]}; }, opt);
  const auto res = rk.integrate(0.0, {1.0}, 1.0);
  CHECK(res.trajectory.back().y[0] == doctest::Approx(std::exp(1.0)).epsilon(1e-10));
  CHECK(res.trajectory.at(0.37).first[0] == doctest::Approx(std::exp(0.37)).epsilon(1e-8));
  CHECK_THROWS_AS(res.trajectory.at(1.5), DomainError);

  const auto fall = make_dormand_prince<1>([](double, const std::array<double, 1>&) { return std::array<double, 1>{-1.0}; }, opt);
  const auto hit = fall.integrate(0.0, {1.0}, 5.0, [](double, const std::array<double, 1>& y) { return y[0]; });
  CHECK(hit.event_hit);
  CHECK(hit.trajectory.back().x == doctest::Approx(1.0).epsilon(1e-10));
}
