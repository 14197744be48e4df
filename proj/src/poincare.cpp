#include "kepler_balance/poincare.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace kb {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double cubic(double x) { return x * x * (x + 0.5); }

// Polynomial product truncated at degree `deg`.
std::vector<double> mul(const std::vector<double>& a, const std::vector<double>& b, std::size_t deg) {
  std::vector<double> out(deg + 1, 0.0);
  for (std::size_t i = 0; i < a.size() && i <= deg; ++i) {
    if (a[i] == 0.0) continue;
    for (std::size_t j = 0; j < b.size() && i + j <= deg; ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

double fpp_from_w1(double t, double f, double fp) {
  if (fp == 0.0) return -kInf;
  return (1.0 / (t * fp) - f * fp + t * fp * fp) / (t * f);
}

// Phase A right-hand side in (tau, u) = (log t, log f).
auto log_phase_rhs(double c) {
  return [c](double tau, const std::array<double, 1>& y) {
    return std::array<double, 1>{-rho(std::max(0.0, c + std::exp(tau - 3.0 * y[0])))};
  };
}

double psi_residual_scaled(double c, double t, double f, double fp) {
  return std::abs(psi(t, f, fp) - c) / std::max(1.0, t / (f * f * f));
}

}  // namespace

double rho(double a) {
  if (!(a >= 0.0)) throw DomainError(fmt::format("rho needs a >= 0, got {}", a));
  if (a == 0.0) return 0.0;
  if (std::isinf(a)) return kInf;
  const double s = std::sqrt(2.0 * a);
  const double lo = std::max(0.0, s - 2.0 * a);
  double x = a <= 1.0 ? s : std::cbrt(a);
  // p is convex and increasing on x > 0 and the start lies above the root, so Newton decreases
  // monotonically; stop once rounding prevents further progress.
  for (int it = 0; it < 200; ++it) {
    const double p = cubic(x) - a;
    if (p <= 0.0) break;
    const double next = std::max(lo, x - p / (x * (3.0 * x + 1.0)));
    if (!(next < x)) break;
    x = next;
  }
  const double below = std::nextafter(x, 0.0);
  return std::abs(cubic(below) - a) < std::abs(cubic(x) - a) ? below : x;
}

double rho_residual(double a) {
  const double r = rho(a);
  return std::abs(cubic(r) - a) / std::max(1.0, a);
}

double rho_of_root(double w) {
  if (w >= 0.0) return rho(w * w);
  if (w * w >= 1.0 / 54.0) throw DomainError("negative branch of rho exists only for |w| < sqrt(1/54)");
  const double s2 = std::sqrt(2.0);
  double x = s2 * w - 2.0 * w * w + 5.0 * s2 * w * w * w;
  for (int it = 0; it < 60; ++it) {
    const double step = (cubic(x) - w * w) / (x * (3.0 * x + 1.0));
    x -= step;
    if (std::abs(step) <= 1e-17 * std::abs(x)) break;
  }
  return x;
}

double psi(double t, double f, double fp) {
  if (!(f > 0.0)) throw DomainError("psi needs f > 0");
  const double r = -t * fp / f;
  return -t / (f * f * f) + 0.5 * r * r + r * r * r;
}

std::vector<double> taylor_at_one(double c, int order) {
  if (order < 0 || order > 4) throw CapabilityError("Taylor data at t = 1 is available up to order 4");
  const std::vector<double> all{0.0, -1.0, 0.5, -0.75, (15.0 + 16.0 * c) / 8.0};
  return {all.begin(), all.begin() + order + 1};
}

std::vector<double> boundary_series(double c, int order) {
  if (order < 1) throw DomainError("boundary series order must be >= 1");
  const std::size_t deg = static_cast<std::size_t>(order) + 2;
  std::vector<double> b(deg + 1, 0.0);
  b[1] = 1.0;
  const std::vector<double> t{1.0, -1.0};
  const std::vector<double> t2 = mul(t, t, deg);
  const std::vector<double> t3 = mul(t2, t, deg);
  for (int i = 2; i <= order; ++i) {
    b[static_cast<std::size_t>(i)] = 0.0;
    std::vector<double> fx(deg + 1, 0.0);
    for (std::size_t k = 1; k <= deg; ++k) fx[k - 1] = static_cast<double>(k) * b[k];
    const std::vector<double> fx2 = mul(fx, fx, deg);
    const std::vector<double> f3 = mul(mul(b, b, deg), b, deg);
    const std::vector<double> a = mul(mul(t2, fx2, deg), b, deg);
    const std::vector<double> d = mul(t3, mul(fx2, fx, deg), deg);
    const std::size_t k = static_cast<std::size_t>(i) - 1;
    const double res = (k < t.size() ? -t[k] : 0.0) + 0.5 * a[k] + d[k] - c * f3[k];
    b[static_cast<std::size_t>(i)] = -res / (3.0 * i);
  }
  b.resize(static_cast<std::size_t>(order) + 1);
  return b;
}

double PoincareSolution::f_at_t0() const {
  if (!t0_) throw PreconditionError("solution did not terminate at an interior point");
  return f0_;
}

ProfileValue PoincareSolution::from_log_state(double tau, double u) const {
  const double t = std::exp(tau);
  const double f = std::exp(u);
  const double fp = -(f / t) * rho(c_ + t / (f * f * f));
  return {f, fp, fpp_from_w1(t, f, fp)};
}

ProfileValue PoincareSolution::from_cusp_state(double t, double f, double w) const {
  const double fp = -(f / t) * rho_of_root(w);
  return {f, fp, fpp_from_w1(t, f, fp)};
}

ProfileValue PoincareSolution::evaluate(double t) const {
  if (!(t > 0.0 && t < 1.0)) throw DomainError(fmt::format("t = {} outside (0,1)", t));
  return evaluate_split(t, 1.0 - t);
}

ProfileValue PoincareSolution::evaluate_split(double t, double omt) const {
  if (omt <= options_.h0) {
    double f = 0.0, d1 = 0.0, d2 = 0.0;
    for (std::size_t i = taylor_.size(); i-- > 0;) {
      d2 = d2 * omt + 2.0 * d1;
      d1 = d1 * omt + f;
      f = f * omt + taylor_[i];
    }
    return {f, -d1, d2};
  }
  if (t >= t_switch_) {
    const double tau = omt < 0.5 ? std::log1p(-omt) : std::log(t);
    // One partial Runge-Kutta step from the preceding node lands on tau with the accuracy of an
    // accepted step; cubic interpolation between the long steps taken here is far less accurate.
    const double target = std::min(tau, log_phase_.front().x);
    if (log_phase_.nodes().size() < 2) return from_log_state(target, log_phase_.front().y[0]);
    const auto& node = log_phase_.nodes()[log_phase_.segment(target)];
    if (target == node.x) return from_log_state(target, node.y[0]);
    OdeOptions ode;
    const auto stepper = make_dormand_prince<1>(log_phase_rhs(c_), ode);
    std::array<double, 1> y1{}, dy1{}, err{};
    stepper.step(node.x, node.y, node.dy, target - node.x, y1, dy1, err);
    return from_log_state(target, y1[0]);
  }
  if (!cusp_phase_.empty() && t >= cusp_phase_.back().y[0]) {
    // t(xi) increases with xi on this phase; nodes run towards decreasing xi.
    double lo = cusp_phase_.back().x, hi = cusp_phase_.front().x;
    for (int it = 0; it < 200 && hi - lo > 1e-16 * std::max(1.0, std::abs(lo)); ++it) {
      const double mid = 0.5 * (lo + hi);
      if (cusp_phase_.at(mid).first[0] < t) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    const auto y = cusp_phase_.at(0.5 * (lo + hi)).first;
    return from_cusp_state(t, y[1], std::max(0.0, y[2]));
  }
  throw DomainError(fmt::format("t = {} below the computed range [{}, 1)", t, t_min_reached_));
}

PoincareSolution solve_poincare(double c, double t_min, double tol, const PoincareOptions& options) {
  if (!(options.h0 > 0.0 && options.h0 < 0.5)) throw DomainError("h0 must lie in (0, 1/2)");
  if (!(t_min > 0.0 && t_min < 1.0 - options.h0)) throw DomainError("t_min must lie in (0, 1 - h0)");
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  if (!std::isfinite(c)) throw DomainError("c must be finite");

  PoincareSolution sol;
  sol.c_ = c;
  sol.options_ = options;
  if (options.taylor_degree <= 4) {
    const std::vector<double> d = taylor_at_one(c, options.taylor_degree);
    double factorial = 1.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (i > 0) factorial *= static_cast<double>(i);
      sol.taylor_.push_back((i % 2 ? -1.0 : 1.0) * d[i] / factorial);
    }
  } else {
    sol.taylor_ = boundary_series(c, options.taylor_degree);
  }

  const double h0 = options.h0;
  double f_start = 0.0;
  for (std::size_t i = sol.taylor_.size(); i-- > 0;) f_start = f_start * h0 + sol.taylor_[i];

  OdeOptions ode;
  ode.rtol = options.ode_tol;
  ode.atol = options.ode_tol;
  ode.h_init = 1e-3 * h0;

  // Phase A: (tau, u) = (log t, log f), du/dtau = -rho(c + e^{tau - 3u}).
  auto rhs_a = log_phase_rhs(c);
  const double tau0 = std::log1p(-h0);
  // A hair past log(t_min) so that exp of the last node does not round above t_min.
  const double tau_end = c < 0.0 ? std::log(1e-12) : std::log(t_min) - 1e-12;
  auto solver_a = make_dormand_prince<1>(rhs_a, ode);
  const double level = options.switch_level;
  auto result_a = c < 0.0 ? solver_a.integrate(tau0, {std::log(f_start)}, tau_end,
                                               [c, level](double tau, const std::array<double, 1>& y) {
                                                 return c + std::exp(tau - 3.0 * y[0]) - level;
                                               })
                          : solver_a.integrate(tau0, {std::log(f_start)}, tau_end);
  sol.log_phase_ = std::move(result_a.trajectory);
  if (c < 0.0 && !result_a.event_hit) throw IntegrationError("c < 0 but c + t/f^3 never dropped to the switch level");
  sol.t_switch_ = std::exp(sol.log_phase_.back().x);
  sol.t_min_reached_ = sol.t_switch_;

  for (const auto& node : sol.log_phase_.nodes()) {
    const double t = std::exp(node.x);
    const double f = std::exp(node.y[0]);
    const double fp = f * node.dy[0] / t;
    sol.grid_.push_back({t, f, fp, fpp_from_w1(t, f, fp), psi_residual_scaled(c, t, f, fp)});
  }

  if (c < 0.0) {
    // Phase B: parameter xi with dt/dxi = w, w^2 = c + t/f^3, smooth through the cusp w = 0.
    auto rhs_b = [](double, const std::array<double, 3>& y) {
      const double t = y[0], f = y[1], w = y[2];
      const double r = rho_of_root(w);
      return std::array<double, 3>{w, -(f / t) * r * w, (1.0 + 3.0 * r) / (2.0 * f * f * f)};
    };
    const double t_s = sol.t_switch_;
    const double f_s = std::exp(sol.log_phase_.back().y[0]);
    const double w_s = std::sqrt(std::max(0.0, c + t_s / (f_s * f_s * f_s)));
    OdeOptions ode_b = ode;
    ode_b.h_init = 1e-4;
    auto solver_b = make_dormand_prince<3>(rhs_b, ode_b);
    auto result_b = solver_b.integrate(0.0, {t_s, f_s, w_s}, -1e4,
                                       [](double, const std::array<double, 3>& y) { return y[2]; });
    if (!result_b.event_hit) throw IntegrationError("cusp point was not reached");
    sol.cusp_phase_ = std::move(result_b.trajectory);
    const auto& last = sol.cusp_phase_.back();
    sol.t0_ = last.y[0];
    sol.f0_ = last.y[1];
    sol.t_min_reached_ = last.y[0];
    bool first = true;
    for (const auto& node : sol.cusp_phase_.nodes()) {
      if (first) {  // duplicate of the last phase A node
        first = false;
        continue;
      }
      const double t = node.y[0], f = node.y[1];
      const double fp = -(f / t) * rho_of_root(std::max(0.0, node.y[2]));
      sol.grid_.push_back({t, f, fp, fpp_from_w1(t, f, fp), psi_residual_scaled(c, t, f, fp)});
    }
  } else if (sol.t_switch_ > t_min * (1.0 + 1e-12)) {
    throw IntegrationError("integration stopped before t_min");
  }

  for (const auto& p : sol.grid_) {
    sol.psi_residual_max_ = std::max(sol.psi_residual_max_, p.psi_residual);
    if (p.t <= 0.99) sol.psi_residual_interior_abs_ = std::max(sol.psi_residual_interior_abs_, std::abs(psi(p.t, p.f, p.fp) - c));
  }
  if (sol.psi_residual_max_ > 100.0 * tol) {
    throw IntegrationError(fmt::format("Psi drift {} exceeds 100 x tol", sol.psi_residual_max_));
  }
  return sol;
}

double origin_exponent(const PoincareSolution& sol) {
  if (sol.t0()) throw PreconditionError("origin exponent needs a solution reaching t -> 0 (c >= 0)");
  const double t_last = sol.t_min_reached();
  if (t_last > 1e-3) throw EstimationError("solution does not reach t <= 1e-3");
  // Interpolated samples, log-spaced over the last decade reached.
  constexpr int count = 41;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < count; ++i) {
    const double t = t_last * std::pow(10.0, static_cast<double>(i) / (count - 1));
    const double x = -std::log(t), y = std::log(sol.evaluate(t).f);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (count * sxy - sx * sy) / (count * sxx - sx * sx);
}

CuspData cusp_data(const PoincareSolution& sol) {
  if (!sol.t0()) throw PreconditionError("cusp data needs a solution terminated at t0 (c < 0)");
  CuspData d{};
  d.t0 = *sol.t0();
  d.f0 = sol.f_at_t0();
  // Q = f0 + q3 s^3 + q4 s^4 + ..., so 2 Q'(s)/s^2 = 4 f'(t0 + s^2)/s = Q'''(0) + O(s).
  auto slope = [&](double s) { return 4.0 * sol.evaluate(d.t0 + s * s).fp / s; };
  const double h = std::min(1e-3, 0.1 * std::sqrt(1.0 - d.t0));
  d.qppp_num = 2.0 * slope(0.5 * h) - slope(h);
  d.qppp_formula = 4.0 * std::sqrt(2.0) / (d.t0 * std::sqrt(d.f0));
  d.qppp_expected = -d.qppp_formula;
  // Q'(s) = 2 s f' = O(s^2) and Q''(s) = 2 f' + 4 s^2 f'' = O(s), extrapolated to s = 0.
  auto q1 = [&](double s) { return 2.0 * s * sol.evaluate(d.t0 + s * s).fp; };
  auto q2 = [&](double s) {
    const ProfileValue v = sol.evaluate(d.t0 + s * s);
    return 2.0 * v.fp + 4.0 * s * s * v.fpp;
  };
  d.qp_num = (4.0 * q1(0.5 * h) - q1(h)) / 3.0;
  d.qpp_num = 2.0 * q2(0.5 * h) - q2(h);
  const double eps = 1e-8;
  d.fp_ratio = sol.evaluate(d.t0 + eps).fp / (-std::sqrt(2.0 * eps) / (d.t0 * std::sqrt(d.f0)));
  return d;
}

double radial_metric(const RadialProfile& p, double r, double x) {
  const double t = x * x * r * r;
  if (p.kind() == ProfileKind::poincare_numeric) {
    // For W[f] = 1 the bracket reduces to t f'/f differentiated in t, which equals -1/(rho f^3).
    const PoincareSolution& sol = p.solution();
    const double f = sol.evaluate(t).f;
    const double f3 = f * f * f;
    const double rr = sol.t0() && t <= *sol.t0() ? 0.0 : rho(std::max(0.0, sol.c() + t / f3));
    return r * r / (rr * f3);
  }
  const ProfileValue v = eval_profile(p, t, 2);
  return -r * r * (v.fp / v.f + t * (v.fpp * v.f - v.fp * v.fp) / (v.f * v.f));
}

RadialLengthResult radial_length(const RadialProfile& p, double r, double x_min) {
  if (!(r > 0.0 && r <= 1.0)) throw DomainError("r must lie in (0,1]");
  if (!(x_min > 0.0 && x_min < 0.1)) throw DomainError("x_min must lie in (0, 0.1)");
  if (p.kind() == ProfileKind::poincare_numeric && p.solution().t_min_reached() > x_min * x_min * r * r) {
    throw PreconditionError("Poincare solution does not reach t = (x_min r)^2");
  }
  auto integrand = [&](double x) { return std::sqrt(std::max(0.0, radial_metric(p, r, x))); };

  RadialLengthResult out{};
  constexpr int kFit = 20;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < kFit; ++i) {
    const double x = x_min * std::pow(10.0, static_cast<double>(i) / (kFit - 1));
    const double lx = std::log(x), ly = std::log(integrand(x));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  out.exponent_fit = (kFit * sxy - sx * sy) / (kFit * sxx - sx * sx);
  const double log_prefactor = (sy - out.exponent_fit * sx) / kFit;

  if (r >= 1.0) {
    // The metric grows like (1-t)^{-2} at the outer boundary; the segment has infinite length.
    out.integral = kInf;
  } else {
    double error = 0.0;
    out.integral = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, x_min, 1.0, 15, 1e-10,
                                                                                  &error);
  }
  if (out.exponent_fit > -1.0) {
    out.tail = std::exp(log_prefactor) * std::pow(x_min, out.exponent_fit + 1.0) / (out.exponent_fit + 1.0);
  } else {
    out.tail = kInf;
  }
  out.finite = std::isfinite(out.integral) && std::isfinite(out.tail);
  return out;
}

}  // namespace kb
