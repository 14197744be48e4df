#pragma once

// Radial Poincare metrics W[f] = 1 (n = 2). Along a solution the quantity
//   Psi = -t/f^3 + t^2 f'^2/(2 f^2) - t^3 f'^3/f^3
// is a constant c, which turns the equation into f' = -(f/t) rho(c + t/f^3).

#include "kepler_balance/ode.hpp"
#include "kepler_balance/profiles.hpp"

#include <array>
#include <optional>
#include <vector>

namespace kb {

/// Nonnegative root of x^3 + x^2/2 = a.
double rho(double a);

/// |rho^3 + rho^2/2 - a| / max(1, a).
double rho_residual(double a);

/// Smooth continuation R(w) of rho(w^2) through w = 0: R^3 + R^2/2 = w^2 with sign(R) = sign(w).
/// Defined for w > -sqrt(1/54).
double rho_of_root(double w);

double psi(double t, double f, double fp);

/// f(1), f'(1), ..., f^{(order)}(1) for order <= 4: (0, -1, 1/2, -3/4, (15+16c)/8).
std::vector<double> taylor_at_one(double c, int order = 4);

/// Coefficients b_0..b_order of f = sum b_i x^i, x = 1 - t, from the formal solution of Psi = c
/// written as -t + t^2 f_x^2 f/2 + t^3 f_x^3 = c f^3.
std::vector<double> boundary_series(double c, int order);

struct PoincareOptions {
  double h0 = 1e-3;         // bootstrap offset from t = 1
  double ode_tol = 1e-13;   // relative and absolute tolerance of the integrator
  double switch_level = 1.0;  // c < 0: leave the log variables once c + t/f^3 drops to this
  int taylor_degree = 4;    // degree of the bootstrap polynomial
};

struct PoincarePoint {
  double t;
  double f;
  double fp;
  double fpp;
  double psi_residual;  // |Psi - c| / max(1, t/f^3)
};

class PoincareSolution {
 public:
  double c() const { return c_; }
  double h0() const { return options_.h0; }
  const PoincareOptions& options() const { return options_; }

  /// Nodes ordered from t = 1 - h0 towards smaller t.
  const std::vector<PoincarePoint>& grid() const { return grid_; }
  double t_min_reached() const { return t_min_reached_; }
  std::optional<double> t0() const { return t0_; }
  /// f(t0); PreconditionError when the solution did not terminate.
  double f_at_t0() const;
  double psi_residual_max() const { return psi_residual_max_; }
  /// max |Psi - c| over grid points with t <= 0.99 (no normalisation).
  double psi_residual_interior_abs() const { return psi_residual_interior_abs_; }

  /// f, f', f'' at t in [t_min_reached, 1); the bootstrap polynomial is used for t > 1 - h0.
  ProfileValue evaluate(double t) const;
  ProfileValue evaluate_split(double t, double omt) const;

 private:
  friend PoincareSolution solve_poincare(double c, double t_min, double tol, const PoincareOptions& options);

  ProfileValue from_log_state(double tau, double u) const;
  ProfileValue from_cusp_state(double t, double f, double w) const;

  double c_ = 0.0;
  PoincareOptions options_;
  std::vector<double> taylor_;  // b_0..b_degree in x = 1 - t
  OdeTrajectory<1> log_phase_;   // x = log t, y = log f
  OdeTrajectory<3> cusp_phase_;  // x = xi, y = (t, f, w)
  std::vector<PoincarePoint> grid_;
  double t_min_reached_ = 1.0;
  double t_switch_ = 0.0;
  std::optional<double> t0_;
  double f0_ = 0.0;
  double psi_residual_max_ = 0.0;
  double psi_residual_interior_abs_ = 0.0;
};

/// Integrates from t = 1 - h0 down to t_min (c >= 0) or to the termination point t0 (c < 0).
PoincareSolution solve_poincare(double c, double t_min, double tol = 1e-10, const PoincareOptions& options = {});

/// Least-squares slope of log f against log(1/t) over the last decade reached.
double origin_exponent(const PoincareSolution& sol);

struct CuspData {
  double t0;
  double f0;
  double qppp_num;       // Q'''(0) for Q(s) = f(t0 + s^2), from f' with extrapolation in s
  double qppp_formula;   // 4 sqrt(2) / (t0 sqrt(f0)), unsigned
  double qppp_expected;  // same magnitude with the sign implied by f' < 0
  double qp_num;         // Q'(0) estimate
  double qpp_num;        // Q''(0) estimate
  double fp_ratio;       // f'(t0 + eps) / (-sqrt(2 eps)/(t0 sqrt(f0)))
};

CuspData cusp_data(const PoincareSolution& sol);

struct RadialLengthResult {
  double integral;      // over (x_min, 1)
  double tail;          // power-law estimate of the part over (0, x_min); infinite if not integrable
  double exponent_fit;  // slope of log(length integrand) against log x near x_min
  bool finite;
};

/// Length of the radial segment x -> x z, |z|^2 = r^2 (r in (0,1]), measured in the metric of the
/// profile: integrand sqrt(g) with g = -r^2 (f'/f + s (f'' f - f'^2)/f^2), s = x^2 r^2.
RadialLengthResult radial_length(const RadialProfile& p, double r, double x_min);

/// Metric coefficient g(x) used by radial_length.
double radial_metric(const RadialProfile& p, double r, double x);

}  // namespace kb
