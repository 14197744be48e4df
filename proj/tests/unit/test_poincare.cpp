#include "kepler_balance/error.hpp"
#include "kepler_balance/poincare.hpp"

#include <doctest.h>

#include <cmath>
#include <memory>

using namespace kb;

TEST_CASE("rho") {
  CHECK(rho(0.0) == 0.0);
  CHECK(rho(1.5) == doctest::Approx(1.0).epsilon(1e-15));
  const double a = 1e-6;
  CHECK(rho(a) == doctest::Approx(std::sqrt(2 * a) - 2 * a).epsilon(1e-5));
  CHECK_THROWS_AS(rho(-1.0), DomainError);
  for (double x : {1e-12, 1e-3, 0.7, 5.0, 1e6}) CHECK(rho_residual(x) < 1e-14);
  for (double w : {-0.1, -1e-4, 0.0, 1e-4, 0.5}) {
    const double R = rho_of_root(w);
    CHECK(R * R * R + R * R / 2 == doctest::Approx(w * w).epsilon(1e-12).scale(1e-12));
    CHECK((R > 0) == (w > 0));
  }
}

TEST_CASE("Psi") {
  for (double t : {0.01, 0.25, 0.9}) CHECK(std::abs(psi(t, 2 - 2 * std::sqrt(t), -1 / std::sqrt(t))) < 1e-12);
  CHECK(psi(0.25, 1.0, -2.0) == doctest::Approx(0.0).scale(1.0));
  CHECK_THROWS_AS(psi(0.5, 0.0, -1.0), DomainError);
}

TEST_CASE("Taylor data at t = 1") {
  const auto d0 = taylor_at_one(0.0);
  CHECK(d0 == std::vector<double>{0.0, -1.0, 0.5, -0.75, 15.0 / 8});
  CHECK(taylor_at_one(1.0)[4] == doctest::Approx(31.0 / 8));
  for (double c : {-0.3, 0.0, 2.0}) {
    CHECK(taylor_at_one(c)[2] == 0.5);
    const auto b = boundary_series(c, 4);
    const auto d = taylor_at_one(c);
    double fact = 1.0;
    for (int i = 0; i <= 4; ++i) {
      if (i > 0) fact *= i;
      CHECK(b[i] == doctest::Approx((i % 2 == 0 ? 1.0 : -1.0) * d[i] / fact).epsilon(1e-14));
    }
  }
}

TEST_CASE("c = 0 reproduces 2 - 2 sqrt t") {
  const auto sol = solve_poincare(0.0, 1e-3);
  CHECK(sol.t_min_reached() <= 1e-3);
  CHECK_FALSE(sol.t0());
  double sup = 0.0;
  for (const auto& p : sol.grid()) sup = std::max(sup, std::abs(p.f - (2 - 2 * std::sqrt(p.t))));
  for (double t : {1e-3, 0.0123, 0.5, 0.999, 1 - 1e-6}) sup = std::max(sup, std::abs(sol.evaluate(t).f - (2 - 2 * std::sqrt(t))));
  CHECK(sup <= 1e-8);
  CHECK(std::abs(origin_exponent(sol)) < 0.05);
}

TEST_CASE("origin exponents") {
  const auto one = solve_poincare(1.0, 1e-8);
  CHECK(origin_exponent(one) == doctest::Approx(rho(1.0)).epsilon(1e-3));
  const auto three_halves = solve_poincare(1.5, 1e-8);
  CHECK(origin_exponent(three_halves) == doctest::Approx(1.0).epsilon(1e-3));
  const double r = rho(1.0);
  const double a = one.evaluate(1e-7).f * std::pow(1e-7, r);
  const double b = one.evaluate(1e-8).f * std::pow(1e-8, r);
  CHECK(a > 0);
  CHECK(b == doctest::Approx(a).epsilon(1e-3));
}

TEST_CASE("negative c terminates with a cusp") {
  const auto sol = solve_poincare(-0.1, 1e-6);
  REQUIRE(sol.t0());
  const double t0 = *sol.t0();
  CHECK(t0 > 0.0);
  CHECK(t0 < 1.0);
  CHECK(std::abs(sol.evaluate(t0 + 1e-12).fp) < 1e-4);
  const CuspData cusp = cusp_data(sol);
  CHECK(cusp.qppp_num / cusp.qppp_expected == doctest::Approx(1.0).epsilon(1e-2));
  CHECK(std::abs(cusp.qp_num) < 1e-4);
  CHECK(std::abs(cusp.qpp_num) < 1e-4);
  CHECK(cusp.fp_ratio == doctest::Approx(1.0).epsilon(1e-2));
  CHECK_THROWS_AS(cusp_data(solve_poincare(0.0, 0.5)), PreconditionError);
  CHECK_THROWS_AS(solve_poincare(0.0, 0.5).f_at_t0(), PreconditionError);
}

TEST_CASE("solutions are deterministic and conserve Psi") {
  const auto a = solve_poincare(0.4, 1e-4);
  const auto b = solve_poincare(0.4, 1e-4);
  REQUIRE(a.grid().size() == b.grid().size());
  for (std::size_t i = 0; i < a.grid().size(); ++i) CHECK(a.grid()[i].f == b.grid()[i].f);
  CHECK(a.psi_residual_max() < 1e-9);
  for (double t : {1e-4, 0.01, 0.3, 0.8}) {
    const ProfileValue v = a.evaluate(t);
    CHECK(psi(t, v.f, v.fp) == doctest::Approx(0.4).epsilon(1e-8));
  }
}

TEST_CASE("numeric profile solves W[f] = 1") {
  const auto p = RadialProfile::poincare_numeric(std::make_shared<PoincareSolution>(solve_poincare(0.7, 1e-4)));
  for (double t : {1e-3, 0.2, 0.6, 0.95}) CHECK(monge_ampere_density(p, 2, t) == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("radial length") {
  const auto flat = radial_length(RadialProfile::sqrt_poincare(), 0.9, 1e-3);
  CHECK(flat.finite);
  CHECK(flat.exponent_fit == doctest::Approx(-0.5).epsilon(0.1));
  const auto numeric = RadialProfile::poincare_numeric(std::make_shared<PoincareSolution>(solve_poincare(1.0, 1e-8)));
  const auto curved = radial_length(numeric, 0.9, 1e-3);
  CHECK(curved.finite);
  CHECK(curved.exponent_fit == doctest::Approx(3 * rho(1.0)).epsilon(0.05 / (3 * rho(1.0))));
  const auto bergman = radial_length(RadialProfile::taylor_at_one({0.0, 1.0}, SeriesVariable::x), 0.5, 1e-2);
  CHECK(std::isfinite(bergman.integral));
}
