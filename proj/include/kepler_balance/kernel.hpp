#pragma once

// Moments c_k = int_0^1 t^k phi(t) dt, the kernel diagonal F(t) = sum_k N(k)/c_{k+n-2} t^k and the
// balanced defect F - c/f^{n+1}.

#include "kepler_balance/parallel.hpp"
#include "kepler_balance/profiles.hpp"
#include "kepler_balance/quadrature.hpp"
#include "kepler_balance/rational.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace kb {

/// A density phi on (0,1) written as phi(t) = t^{-e} r(t) with r bounded up to log factors at 0.
class Density {
 public:
  using Regular = std::function<double(const QuadNode&)>;

  static Density constant_one();
  static Density phi_v(double v);
  /// W[f] of a profile; endpoint exponent 0.
  static Density monge_ampere(RadialProfile profile, int n);
  static Density custom(std::string name, Regular regular, double endpoint_exponent, bool possibly_negative = false);

  const std::string& name() const { return name_; }
  double endpoint_exponent() const { return exponent_; }
  /// Smallest k with a finite moment: k - e > -1.
  int k_min() const;
  bool possibly_negative() const { return possibly_negative_; }

  double regular(const QuadNode& node) const { return regular_(node); }
  /// phi(t) for t in (0,1).
  double operator()(double t) const;

  /// Exact moment when known in closed form without quadrature (constant_one only).
  std::optional<double> exact_moment(int k) const;

 private:
  Density() = default;

  std::string name_;
  Regular regular_;
  double exponent_ = 0.0;
  bool possibly_negative_ = false;
  bool is_constant_one_ = false;
};

struct MomentEntry {
  double value;
  double error;  // absolute error estimate
};

struct MomentSequence {
  int k_min = 0;
  std::map<int, MomentEntry> values;
  bool signed_density = false;

  /// c_k; DivergenceError below k_min.
  double at(int k) const;
};

/// Moment engine with the density cached on the tanh-sinh nodes. c_k for distinct k are
/// computed independently (in parallel when requested); each c_k is a sequential sum over nodes,
/// so results do not depend on the schedule.
class MomentEngine {
 public:
  explicit MomentEngine(Density density, double tol = 1e-13);

  const Density& density() const { return density_; }
  double tolerance() const { return tol_; }
  bool saw_negative_values() const { return negative_; }

  /// Makes c_k available for k_min <= k <= k_max.
  void ensure(int k_max, Execution mode = Execution::parallel);
  MomentEntry moment(int k);
  int computed_up_to() const { return density_.k_min() + static_cast<int>(values_.size()) - 1; }

  /// Single moment straight from the quadrature, bypassing the cache.
  MomentEntry compute(int k) const;

 private:
  Density density_;
  double tol_;
  std::vector<std::vector<double>> regular_;  // per level, per node
  std::vector<MomentEntry> values_;           // index k - k_min
  bool negative_ = false;
};

/// Moments c_{k_min..k_max} with absolute accuracy tol. DivergenceError if k_max < k_min.
MomentSequence moments(const Density& density, int k_max, double tol = 1e-13,
                       Execution mode = Execution::parallel);

/// Single moment; DivergenceError below k_min.
double moment(const Density& density, int k, double tol = 1e-13);

/// N(k) = C(k+n-1, n-1) + C(k+n-2, n-1).
std::uint64_t dimension_count(int k, int n);
double dimension_count_real(int k, int n);

/// (2k+1) / ((2k+2m+2 delta+1)(k+1-m-delta)).
double moment_phi_v_closed(double v, int k);
/// Exact version; nullopt when sqrt(v) is irrational.
std::optional<Rational> moment_phi_v_exact(const Rational& v, int k);

/// t^m (1 + 3t + 4m(1-t) - delta(4m + 2 delta - 1)(1-t)^2) / (1-t)^3.
double closed_form_F_phi_v(double v, double t);

struct KernelEval {
  double t;
  double value;
  int terms_used;
  double tail_bound;
};

/// F(t) for one density and dimension n, reusing moments across evaluation points.
class KernelEvaluator {
 public:
  KernelEvaluator(Density density, int n, double moment_tol = 1e-13);

  /// Sums until the geometric tail bound is below tol * max(1, |F|). ConvergenceError beyond
  /// 10^6 terms.
  KernelEval evaluate(double t, double tol = 1e-12);

  const Density& density() const { return engine_.density(); }
  int n() const { return n_; }
  MomentEngine& engine() { return engine_; }

 private:
  double term(int k);

  MomentEngine engine_;
  int n_;
};

KernelEval kernel_series(const Density& density, int n, double t, double tol = 1e-12);

/// Density whose kernel is compared with c/f^{n+1}: phi_v for the candidate profile (the germ it
/// was built from), phi = 1 for constant_one, W[f] otherwise.
Density default_density(const RadialProfile& p, int n);

struct DefectResult {
  double value;  // F(t) - c/f(t)^{n+1}
  double F;
  double c;
  double f;
  bool signed_density;  // density took negative values somewhere on the quadrature nodes
};

DefectResult balanced_defect(KernelEvaluator& kernel, const RadialProfile& p, double c, double t);
/// c = nullopt selects estimate_c.
DefectResult balanced_defect(const RadialProfile& p, int n, std::optional<double> c, double t);

struct CEstimate {
  double c;
  std::vector<double> diagonal;  // Richardson diagonal R[i][i]
  std::vector<double> raw;       // f^{n+1} F at t_i = 1 - 2^{-i} h0
};

/// Richardson limit of f^{n+1} F as t -> 1 over t_i = 1 - 2^{-i} h0, i = 0..levels-1.
CEstimate estimate_c(KernelEvaluator& kernel, const RadialProfile& p, double h0 = 0.1, int levels = 6);
CEstimate estimate_c(const RadialProfile& p, int n);

}  // namespace kb
