#pragma once

// Radial weight profiles f(t) on [0,1), their derivatives, and the Monge-Ampere density
//   W[f] = (-1)^n t f'^{n-1} (f f' + t f f'' - t f'^2).

#include "kepler_balance/log_series.hpp"

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace kb {

class PoincareSolution;

enum class ProfileKind { sqrt_poincare, explicit_n, phi_v_candidate, taylor_at_one, poincare_numeric, constant_one };

std::string_view to_string(ProfileKind kind);
ProfileKind parse_profile_kind(std::string_view name);

/// Variable of a taylor_at_one polynomial: L = log(1/t) or x = 1 - t.
enum class SeriesVariable { L, x };

struct ProfileValue {
  double f = 0.0;
  double fp = 0.0;
  double fpp = 0.0;
};

/// Integer part m and fractional part delta of (sqrt(v) + 1)/4, v >= 0.
struct PhiVIndex {
  int m;
  double delta;
};
PhiVIndex phi_v_index(double v);

class RadialProfile {
 public:
  static RadialProfile sqrt_poincare();
  static RadialProfile explicit_n(int n);
  static RadialProfile phi_v_candidate(double v);
  /// Polynomial sum_i coeffs[i] var^i. Requires coeffs[0] = 0 and coeffs[1] > 0; rescaled so that
  /// f'(1) = -1.
  static RadialProfile taylor_at_one(std::vector<double> coeffs, SeriesVariable var = SeriesVariable::L);
  static RadialProfile poincare_numeric(std::shared_ptr<const PoincareSolution> solution);
  static RadialProfile constant_one();

  ProfileKind kind() const { return kind_; }
  int n() const { return n_; }
  double v() const { return v_; }
  const std::vector<double>& coeffs() const { return coeffs_; }
  SeriesVariable variable() const { return variable_; }
  const PoincareSolution& solution() const;
  bool has_solution() const { return static_cast<bool>(solution_); }

  /// Constant factor applied on top of the catalog formula (1 unless scaled()).
  double scale() const { return scale_; }
  RadialProfile scaled(double factor) const;

  /// Whether f(1) = 0 and f'(1) = -1 (all kinds except constant_one and scaled copies).
  bool vanishes_at_one() const;

  /// For taylor_at_one in L: magnitude of the last retained term at t, a truncation indicator;
  /// the declared validity radius is L <= 0.5. Zero for exact kinds.
  double truncation_indicator(double t) const;

  std::string describe() const;

 private:
  RadialProfile() = default;

  ProfileKind kind_ = ProfileKind::constant_one;
  int n_ = 2;
  double v_ = 0.0;
  std::vector<double> coeffs_;
  SeriesVariable variable_ = SeriesVariable::L;
  std::shared_ptr<const PoincareSolution> solution_;
  double scale_ = 1.0;
};

/// f, f', f'' at t in (0,1). Entries above `order` are left at zero.
ProfileValue eval_profile(const RadialProfile& p, double t, int order = 2);

/// Same, with 1 - t supplied separately so points close to t = 1 keep full relative accuracy.
ProfileValue eval_profile_split(const RadialProfile& p, double t, double omt, int order = 2);

/// f(0) where the profile is finite there; DomainError otherwise.
double profile_at_origin(const RadialProfile& p);

/// W[f](t) from the values (f, f', f'').
double monge_ampere_from_values(const ProfileValue& value, int n, double t);

double monge_ampere_density(const RadialProfile& p, int n, double t);
double monge_ampere_density_split(const RadialProfile& p, int n, double t, double omt);

/// phi_v(t) = t^{-1/4} [cosh(sqrt(v) L/4) - sinh(sqrt(v) L/4)/sqrt(v)], L = log(1/t); the
/// trigonometric form for v < 0, the limit t^{-1/4}(1 + log(t)/4) at v = 0.
double phi_v(double v, double t);

/// phi_v evaluated with the root -sqrt(v) instead of +sqrt(v) when `negative_root` is set.
double phi_v_branch(double v, double t, bool negative_root);

/// phi_v(t) t^{e} with e = phi_v_endpoint_exponent(v): bounded as t -> 0 up to log factors.
double phi_v_regular(double v, double L);
double phi_v_endpoint_exponent(double v);

/// L-series of f at t = 1 through L^order.
LogSeries<double> profile_series_at_one(const RadialProfile& p, int order);

/// L-series of e^{a L} through L^order.
template <class T>
LogSeries<T> exp_linear(const T& a, int order) {
  LogSeries<T> out(order);
  T term = T(1);
  for (int i = 0; i <= order; ++i) {
    if (i > 0) term = term * a / T(i);
    out.set(i, 0, term);
  }
  return out;
}

/// Density phi = e^L f_L (f_L^2 - f f_LL) of an L-series f = L + ..., through L^order
/// (order < 0: as far as the input allows, i.e. f.order() - 1).
template <class T>
LogSeries<T> density_in_L(const LogSeries<T>& f, int order = -1) {
  if (f.valuation() != 1 || f.coeff(1, 0) != T(1)) {
    throw NormalizationError("density_in_L: series must start with exactly L");
  }
  for (const auto& [key, value] : f.terms()) {
    if (key.first == 1 && key.second != 0) throw NormalizationError("density_in_L: log factor at order L");
  }
  const int available = f.order() - 1;
  if (order < 0) order = available;
  if (order > available) {
    throw TruncationError("density_in_L: f known through L^" + std::to_string(f.order()) +
                          ", cannot produce L^" + std::to_string(order));
  }
  const LogSeries<T> f1 = f.derivative();
  const LogSeries<T> f2 = f1.derivative();
  const LogSeries<T> bracket = f1 * f1 - f * f2;
  return (exp_linear(T(1), order) * f1 * bracket).truncated(order);
}

/// L-coefficients of W[f] - phi_v at t = 1 for n = 2, orders 0..order.
std::vector<double> germ_residual(const RadialProfile& p, double v, int order);

/// Parses "kind", "kind:key=value,..." or a JSON object {"kind":..., "params":{...}}.
RadialProfile parse_profile(std::string_view text);

/// Kind plus raw parameters, before construction. Used to merge CLI flags with file contents.
struct ProfileSpec {
  ProfileKind kind = ProfileKind::constant_one;
  std::map<std::string, std::string> params;
};
ProfileSpec parse_profile_spec(std::string_view text);
ProfileSpec load_profile_spec_file(const std::string& path);
/// Entries of `preferred` replace those of `base`.
ProfileSpec merge_specs(const ProfileSpec& base, const ProfileSpec& preferred);
RadialProfile build_profile(const ProfileSpec& spec);

}  // namespace kb
