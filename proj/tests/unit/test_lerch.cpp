#include "kepler_balance/error.hpp"
#include "kepler_balance/lerch.hpp"
#include "kepler_balance/special.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace kb;

TEST_CASE("direct sums") {
  CHECK(lerch_phi(0.5, 0.0, 0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(0.5 * lerch_phi(0.5, 1.0, 0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(lerch_phi(0.0, 3.0, 2) == 0.0);
  CHECK_THROWS_AS(lerch_phi(1.0, 2.0, 0), DomainError);
}

TEST_CASE("integer formula matches direct summation") {
  const double t = std::exp(-1.0);
  CHECK(t * lerch_phi(t, 2.0, 0) == doctest::Approx(lerch_integer_formula(2, 1.0)).epsilon(1e-9));
  for (int m = 1; m <= 6; ++m)
    for (double L : {0.05, 0.5, 2.0}) {
      const double tt = std::exp(-L);
      CHECK(tt * lerch_phi(tt, m, 0) == doctest::Approx(lerch_integer_formula(m, L)).epsilon(1e-11));
    }
}

TEST_CASE("boundary expansions at s = 0 and s = 1") {
  const auto e0 = lerch_boundary_expansion(0.0, 0, 6);
  // t/(1-t) = 1/L - 1/2 + L/12 - ...
  CHECK(e0.singular.at(0) == doctest::Approx(1.0));
  CHECK(e0.regular.at(0) == doctest::Approx(-0.5));
  CHECK(e0.regular.at(1) == doctest::Approx(1.0 / 12));
  const auto e1 = lerch_boundary_expansion(1.0, 0, 6);
  // -log(1 - e^{-L}) = -log L + L/2 - L^2/24 + ...
  CHECK(e1.singular.at(1) == doctest::Approx(-1.0));
  CHECK(e1.regular.at(1) == doctest::Approx(0.5));
  const auto e0_long = lerch_boundary_expansion(0.0, 0, 30);
  for (double L : {0.1, 0.7, 2.5}) {
    CHECK(e0_long.evaluate(L) == doctest::Approx(std::exp(-L) / (1 - std::exp(-L))).epsilon(1e-10));
    CHECK(lerch_boundary_expansion(1.0, 0, 30).evaluate(L) == doctest::Approx(-std::log(1 - std::exp(-L))).epsilon(1e-10));
  }
}

TEST_CASE("two evaluation paths agree") {
  for (double s : {-1.5, 0.5, 2.0, 3.0, 4.5})
    for (int n = 0; n <= 3; ++n)
      for (double L : {0.2, 1.0, 3.0}) {
        const double t = std::exp(-L);
        const double direct = lerch_phi(t, s, n);
        CHECK(lerch_phi_boundary(t, s, n) == doctest::Approx(direct).epsilon(1e-9).scale(1.0));
      }
  CHECK_THROWS_AS(lerch_phi_boundary(std::exp(-7.0), 2.0, 0), CapabilityError);
}

TEST_CASE("s = 2, one derivative carries the Stieltjes term") {
  const auto e = lerch_singular_part(2.0, 1);
  REQUIRE(e.singular.size() == 3);
  CHECK(e.singular[2] == doctest::Approx(0.5));
  const auto& ctx = default_lerch_context();
  const double c11 = ctx.c(2, 1), c20 = ctx.c(2, 0);
  CHECK(e.singular[0] == doctest::Approx(c11 + ctx.stieltjes(1)).epsilon(1e-13));
  CHECK(e.singular[1] == doctest::Approx(c20).epsilon(1e-13));
}

TEST_CASE("Gamma Laurent constants") {
  const auto& ctx = default_lerch_context();
  CHECK(ctx.c(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(ctx.c(1, 0) == doctest::Approx(-std::numbers::egamma).epsilon(1e-14));
  CHECK(ctx.stieltjes(0) == doctest::Approx(std::numbers::egamma).epsilon(1e-15));
  CHECK(ctx.stieltjes(1) == doctest::Approx(-0.0728158454836767248605863758749547).epsilon(1e-15));
  CHECK(ctx.recurrence_residual() < 1e-12);
  CHECK(ctx.gamma_derivative(1.0, 1) == doctest::Approx(-std::numbers::egamma).epsilon(1e-14));
}

TEST_CASE("embedded Stieltjes table reproduces") {
  const auto& table = stieltjes_table();
  for (int j = 0; j <= 10; ++j) CHECK(table[j] == doctest::Approx(stieltjes_recompute(j)).epsilon(1e-13).scale(1e-3));
}
