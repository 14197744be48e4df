#include "kepler_balance/error.hpp"
#include "kepler_balance/profiles.hpp"

#include <doctest.h>

#include <cmath>

using namespace kb;

TEST_CASE("sqrt_poincare values and boundary normalisation") {
  const auto p = RadialProfile::sqrt_poincare();
  const ProfileValue v = eval_profile(p, 0.25);
  CHECK(v.f == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(v.fp == doctest::Approx(-2.0).epsilon(1e-15));
  CHECK(v.fpp == doctest::Approx(4.0).epsilon(1e-15));
  const ProfileValue edge = eval_profile_split(p, 1.0 - 1e-12, 1e-12);
  CHECK(std::abs(edge.f) < 1e-11);
  CHECK(edge.fp == doctest::Approx(-1.0).epsilon(1e-11));
  CHECK(p.vanishes_at_one());
}

TEST_CASE("constant_one") {
  const auto p = RadialProfile::constant_one();
  const ProfileValue v = eval_profile(p, 0.5);
  CHECK(v.f == 1.0);
  CHECK(v.fp == 0.0);
  CHECK(v.fpp == 0.0);
  CHECK_FALSE(p.vanishes_at_one());
}

TEST_CASE("evaluation outside (0,1) is a domain error") {
  const auto p = RadialProfile::sqrt_poincare();
  CHECK_THROWS_AS(eval_profile(p, 1.5), DomainError);
  CHECK_THROWS_AS(eval_profile(p, -0.1), DomainError);
}

TEST_CASE("W[f] = 1 for the explicit solutions") {
  const auto p = RadialProfile::sqrt_poincare();
  for (double t : {1e-6, 0.01, 0.25, 0.5, 0.9, 0.999999}) CHECK(monge_ampere_density(p, 2, t) == doctest::Approx(1.0).epsilon(1e-12));
  for (int n = 2; n <= 6; ++n) {
    const auto g = RadialProfile::explicit_n(n);
    for (double t : {0.05, 0.5, 0.95}) CHECK(monge_ampere_density(g, n, t) == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(monge_ampere_density(RadialProfile::explicit_n(3), 3, 0.5) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("W of the candidate profile matches its closed form") {
  const auto p = RadialProfile::phi_v_candidate(1.0);
  for (double t : {0.1, 0.3, 0.7}) {
    const double closed = 16 * t * (1 + t) * (1 + 2 * t + 5 * t * t) / std::pow(1 + 3 * t, 4);
    CHECK(monge_ampere_density(p, 2, t) == doctest::Approx(closed).epsilon(1e-12));
  }
  CHECK(monge_ampere_density(p, 2, 0.1) == doctest::Approx(0.77028).epsilon(1e-5));
}

TEST_CASE("phi_v special values") {
  CHECK(phi_v(1.0, 0.3) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(phi_v(9.0, 0.25) == doctest::Approx(5.0 / 3.0).epsilon(1e-14));
  for (double v : {-4.0, 0.0, 2.0, 9.0}) CHECK(phi_v(v, 1.0 - 1e-15) == doctest::Approx(1.0).epsilon(1e-13));
  // v = 0: t^{-1/4}(1 + log(t)/4)
  CHECK(phi_v(0.0, 0.4) == doctest::Approx(std::pow(0.4, -0.25) * (1 + std::log(0.4) / 4)).epsilon(1e-14));
}

TEST_CASE("phi_v is invariant under the choice of square root") {
  for (double v : {0.5, 2.0, 9.0, 25.0})
    for (double t : {0.01, 0.2, 0.8}) CHECK(phi_v_branch(v, t, true) == doctest::Approx(phi_v_branch(v, t, false)).epsilon(1e-13));
}

TEST_CASE("phi_v is continuous in v at zero") {
  for (double t : {0.05, 0.3, 0.9}) {
    CHECK(phi_v(1e-10, t) == doctest::Approx(phi_v(0.0, t)).epsilon(1e-9));
    CHECK(phi_v(-1e-10, t) == doctest::Approx(phi_v(0.0, t)).epsilon(1e-9));
  }
}

TEST_CASE("phi_v approaches 1 quadratically at t = 1") {
  for (double v : {0.0, 3.0, 9.0}) {
    const double c3 = (phi_v(v, 1 - 1e-3) - 1) / 1e-6;
    const double c4 = (phi_v(v, 1 - 1e-4) - 1) / 1e-8;
    CHECK(std::abs(c3) < 10.0);
    CHECK(c3 == doctest::Approx(c4).epsilon(2e-3 * std::max(1.0, std::abs(c3)) + 1e-3));
  }
}

TEST_CASE("density_in_L on simple germs") {
  LogSeries<double> f(6);
  f.set(1, 0, 1.0);
  const auto phi = density_in_L(f);
  // f = L gives e^L
  double fact = 1.0;
  for (int j = 0; j <= 5; ++j) {
    if (j > 0) fact *= j;
    CHECK(phi.coeff(j) == doctest::Approx(1.0 / fact));
  }
  const double A1 = 0.3;
  LogSeries<double> g(4);
  g.set(1, 0, 1.0);
  g.set(2, 0, -(2 * A1 + 3) / 12);
  g.set(3, 0, 0.17);
  CHECK(density_in_L(g).coeff(1) == doctest::Approx(-2 * A1 / 3).epsilon(1e-14));
}

TEST_CASE("series of 2 - 2 sqrt t has density 1") {
  const auto phi = density_in_L(profile_series_at_one(RadialProfile::sqrt_poincare(), 12));
  CHECK(phi.coeff(0) == doctest::Approx(1.0));
  for (int j = 1; j <= 11; ++j) CHECK(std::abs(phi.coeff(j)) < 1e-13);
}

TEST_CASE("germ residual") {
  for (double r : germ_residual(RadialProfile::sqrt_poincare(), 1.0, 8)) CHECK(std::abs(r) < 1e-12);
  for (double r : germ_residual(RadialProfile::phi_v_candidate(1.0), 1.0, 3)) CHECK(std::abs(r) < 1e-12);
  const auto taylor = germ_residual(RadialProfile::taylor_at_one({0.0, 1.0}), 0.0, 1);
  CHECK(std::abs(taylor[0]) + std::abs(taylor[1]) > 1e-3);
}

TEST_CASE("profile specs: inline, JSON, merge precedence") {
  const ProfileSpec inline_spec = parse_profile_spec("phi_v_candidate:v=9");
  CHECK(inline_spec.kind == ProfileKind::phi_v_candidate);
  CHECK(inline_spec.params.at("v") == "9");
  const ProfileSpec json_spec = parse_profile_spec(R"({"kind":"phi_v_candidate","params":{"v":4}})");
  CHECK(build_profile(json_spec).v() == 4.0);
  const ProfileSpec merged = merge_specs(inline_spec, json_spec);
  CHECK(build_profile(merged).v() == 4.0);
  CHECK_THROWS_AS(parse_profile("no_such_kind"), ConfigError);
  CHECK_THROWS_AS(parse_profile("phi_v_candidate:w=1"), ConfigError);
  CHECK_THROWS_AS(parse_profile("{\"kind\":"), ConfigError);
  CHECK_THROWS_AS(load_profile_spec_file("/nonexistent/profile.json"), ConfigError);
  CHECK(parse_profile("explicit_n:n=4").n() == 4);
}

TEST_CASE("scaled profile") {
  const auto p = RadialProfile::sqrt_poincare();
  const auto q = p.scaled(2.0);
  CHECK(eval_profile(q, 0.3).f == doctest::Approx(2 * eval_profile(p, 0.3).f));
  CHECK(q.scale() == 2.0);
}

TEST_CASE("taylor_at_one profile is normalised") {
  const auto p = RadialProfile::taylor_at_one({0.0, 2.0, -0.5});
  const ProfileValue v = eval_profile_split(p, 1 - 1e-9, 1e-9);
  CHECK(v.fp == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK_THROWS(RadialProfile::taylor_at_one({1.0, 1.0}));
}
