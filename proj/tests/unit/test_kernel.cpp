#include "kepler_balance/error.hpp"
#include "kepler_balance/kernel.hpp"
#include "kepler_balance/profiles.hpp"

#include <doctest.h>

#include <cmath>

using namespace kb;

TEST_CASE("dimension counts") {
  CHECK(dimension_count(3, 2) == 7);
  CHECK(dimension_count(0, 2) == 1);
  CHECK(dimension_count(2, 3) == 9);
  for (int k = 0; k < 20; ++k) {
    CHECK(dimension_count(k, 2) == static_cast<std::uint64_t>(2 * k + 1));
    CHECK(dimension_count(k, 3) == static_cast<std::uint64_t>((k + 1) * (k + 1)));
    for (int n = 1; n <= 5; ++n) CHECK(dimension_count_real(k, n) == doctest::Approx(static_cast<double>(dimension_count(k, n))));
  }
  CHECK_THROWS_AS(dimension_count(2'000'000, 60), DomainError);
  CHECK_THROWS_AS(dimension_count(-1, 2), DomainError);
}

TEST_CASE("moments of known densities") {
  const auto one = moments(Density::constant_one(), 10);
  for (int k = 0; k <= 10; ++k) CHECK(one.at(k) == doctest::Approx(1.0 / (k + 1)).epsilon(1e-15));
  CHECK(moment(Density::phi_v(9.0), 1) == doctest::Approx(0.6).epsilon(1e-13));
  CHECK(moment(Density::phi_v(0.0), 0) == doctest::Approx(8.0 / 9.0).epsilon(1e-13));
}

TEST_CASE("moments agree with the closed form") {
  for (double v : {0.0, 0.5, 1.0, 4.0, 9.0, 30.0}) {
    const auto seq = moments(Density::phi_v(v), 40);
    for (int k = seq.k_min; k <= 40; ++k)
      CHECK(seq.at(k) == doctest::Approx(moment_phi_v_closed(v, k)).epsilon(1e-12));
  }
  CHECK(moment_phi_v_closed(1.0, 2) == doctest::Approx(1.0 / 3.0));
  CHECK(moment_phi_v_closed(9.0, 1) == doctest::Approx(0.6));
  CHECK(moment_phi_v_closed(0.0, 0) == doctest::Approx(8.0 / 9.0));
  CHECK(*moment_phi_v_exact(Rational(9), 1) == Rational(3, 5));
  CHECK(*moment_phi_v_exact(Rational(0), 0) == Rational(8, 9));
}

TEST_CASE("divergent and unsupported moments") {
  CHECK(Density::phi_v(9.0).k_min() == 1);
  try {
    moment(Density::phi_v(9.0), 0);
    FAIL("expected divergence");
  } catch (const DivergenceError& e) {
    CHECK(e.first_finite_k() == 1);
  }
  CHECK_THROWS_AS(moment_phi_v_closed(9.0, 0), DivergenceError);
  CHECK_THROWS_AS(moment_phi_v_closed(-1.0, 3), CapabilityError);
  const auto seq = moments(Density::phi_v(9.0), 5);
  CHECK_THROWS_AS(seq.at(0), DivergenceError);
}

TEST_CASE("moments of a positive density decrease in k") {
  for (const Density& d : {Density::constant_one(), Density::phi_v(2.0), Density::monge_ampere(RadialProfile::phi_v_candidate(1.0), 2)}) {
    const auto seq = moments(d, 60);
    for (int k = seq.k_min + 1; k <= 60; ++k) CHECK(seq.at(k) < seq.at(k - 1));
  }
}

TEST_CASE("signed densities are flagged") {
  CHECK(moments(Density::phi_v(-40.0), 10).signed_density);
  CHECK_FALSE(moments(Density::phi_v(4.0), 10).signed_density);
}

TEST_CASE("serial and parallel moments are identical") {
  for (const Density& d : {Density::phi_v(3.0), Density::monge_ampere(RadialProfile::sqrt_poincare(), 2)}) {
    const auto a = moments(d, 300, 1e-13, Execution::serial);
    const auto b = moments(d, 300, 1e-13, Execution::parallel);
    for (int k = a.k_min; k <= 300; ++k) CHECK(a.at(k) == b.at(k));
  }
}

TEST_CASE("kernel sums") {
  CHECK(kernel_series(Density::constant_one(), 2, 0.5).value == doctest::Approx(20.0).epsilon(1e-12));
  CHECK(kernel_series(Density::constant_one(), 2, 0.0).value == 1.0);
  CHECK(kernel_series(Density::phi_v(9.0), 2, 0.5).value == doctest::Approx(closed_form_F_phi_v(9.0, 0.5)).epsilon(1e-9));
  CHECK(closed_form_F_phi_v(1.0, 0.5) == doctest::Approx(20.0));
  CHECK(closed_form_F_phi_v(1.0, 0.0) == doctest::Approx(1.0));
  CHECK(closed_form_F_phi_v(9.0, 0.5) == doctest::Approx(18.0));
  for (double v : {0.0, 2.0, 7.0})
    for (double t : {0.1, 0.6, 0.95})
      CHECK(kernel_series(Density::phi_v(v), 2, t).value == doctest::Approx(closed_form_F_phi_v(v, t)).epsilon(1e-10));
}

TEST_CASE("kernel near t = 1 exhausts the term budget") {
  KernelEvaluator k(Density::constant_one(), 2);
  CHECK_THROWS_AS(k.evaluate(1.0 - 1e-8), ConvergenceError);
}

TEST_CASE("balanced defect") {
  const auto candidate = RadialProfile::phi_v_candidate(1.0);
  CHECK(std::abs(balanced_defect(candidate, 2, 4.0, 0.5).value) < 1e-10);
  CHECK(std::abs(balanced_defect(candidate, 2, 4.0, 0.0).value) < 1e-12);
  CHECK(balanced_defect(RadialProfile::sqrt_poincare(), 2, 4.0, 0.0).value == doctest::Approx(0.5));
}

TEST_CASE("balancing constant") {
  CHECK(estimate_c(RadialProfile::phi_v_candidate(1.0), 2).c == doctest::Approx(4.0).epsilon(1e-6 / 4));
  CHECK(estimate_c(RadialProfile::sqrt_poincare(), 2).c == doctest::Approx(4.0).epsilon(1e-4 / 4));
  const auto p = RadialProfile::phi_v_candidate(1.0);
  KernelEvaluator kernel(default_density(p, 2), 2);
  const double c1 = estimate_c(kernel, p).c;
  const double c2 = estimate_c(kernel, p.scaled(2.0)).c;
  CHECK(c2 == doctest::Approx(8.0 * c1).epsilon(1e-9));
}
