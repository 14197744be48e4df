#include "kepler_balance/profiles.hpp"

#include "kepler_balance/poincare.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace kb {

namespace {

using nlohmann::json;

void check_order(int order) {
  if (order < 0 || order > 2) throw CapabilityError(fmt::format("derivative order {} not available", order));
}

double log_t_of(double t, double omt) { return omt < 0.5 ? std::log1p(-omt) : std::log(t); }

ProfileValue scale_value(ProfileValue v, double s) {
  v.f *= s;
  v.fp *= s;
  v.fpp *= s;
  return v;
}

ProfileValue eval_candidate(double v, double t, double omt) {
  const auto [m, delta] = phi_v_index(v);
  const double kappa = delta * (4.0 * m + 2.0 * delta - 1.0);
  const double p = 1.0 + 3.0 * t + 4.0 * m * omt - kappa * omt * omt;
  const double dp = 3.0 - 4.0 * m + 2.0 * kappa * omt;
  const double ddp = -2.0 * kappa;
  const double q = std::cbrt(4.0 / p) * std::exp(-m / 3.0 * std::log(t));
  const double gamma = -m / (3.0 * t) - dp / (3.0 * p);
  const double dgamma = m / (3.0 * t * t) - (ddp * p - dp * dp) / (3.0 * p * p);
  const double dq = q * gamma;
  const double ddq = q * (gamma * gamma + dgamma);
  return {q * omt, dq * omt - q, ddq * omt - 2.0 * dq};
}

ProfileValue eval_polynomial(const std::vector<double>& c, double y) {
  double f = 0.0, d1 = 0.0, d2 = 0.0;
  for (std::size_t i = c.size(); i-- > 0;) {
    d2 = d2 * y + 2.0 * d1;
    d1 = d1 * y + f;
    f = f * y + c[i];
  }
  return {f, d1, d2};
}

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::string item;
  std::istringstream is(text);
  while (std::getline(is, item, '|')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw ConfigError("bad number '" + item + "'");
    } catch (const std::logic_error&) {
      throw ConfigError("bad number '" + item + "' in coefficient list");
    }
  }
  return out;
}

double param_double(const ProfileSpec& spec, const std::string& key, double fallback) {
  auto it = spec.params.find(key);
  if (it == spec.params.end()) return fallback;
  if (auto r = parse_rational(it->second)) return to_double(*r);
  throw ConfigError(fmt::format("parameter {}='{}' is not a number", key, it->second));
}

std::string json_scalar_to_string(const json& value) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_number_integer()) return std::to_string(value.get<long long>());
  if (value.is_number()) return fmt::format("{:.17g}", value.get<double>());
  if (value.is_array()) {
    std::string out;
    for (const auto& item : value) {
      if (!out.empty()) out += '|';
      out += json_scalar_to_string(item);
    }
    return out;
  }
  throw ConfigError("unsupported profile parameter value " + value.dump());
}

ProfileSpec spec_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    throw ConfigError("profile JSON needs a string field \"kind\"");
  }
  ProfileSpec spec;
  spec.kind = parse_profile_kind(j["kind"].get<std::string>());
  if (j.contains("params")) {
    if (!j["params"].is_object()) throw ConfigError("profile \"params\" must be an object");
    for (const auto& [key, value] : j["params"].items()) spec.params[key] = json_scalar_to_string(value);
  }
  return spec;
}

}  // namespace

std::string_view to_string(ProfileKind kind) {
  switch (kind) {
    case ProfileKind::sqrt_poincare: return "sqrt_poincare";
    case ProfileKind::explicit_n: return "explicit_n";
    case ProfileKind::phi_v_candidate: return "phi_v_candidate";
    case ProfileKind::taylor_at_one: return "taylor_at_one";
    case ProfileKind::poincare_numeric: return "poincare_numeric";
    case ProfileKind::constant_one: return "constant_one";
  }
  return "unknown";
}

ProfileKind parse_profile_kind(std::string_view name) {
  for (auto kind : {ProfileKind::sqrt_poincare, ProfileKind::explicit_n, ProfileKind::phi_v_candidate,
                    ProfileKind::taylor_at_one, ProfileKind::poincare_numeric, ProfileKind::constant_one}) {
    if (to_string(kind) == name) return kind;
  }
  throw ConfigError(fmt::format("unknown profile kind '{}'", name));
}

PhiVIndex phi_v_index(double v) {
  if (!(v >= 0.0)) throw CapabilityError("m and delta are defined for v >= 0 only");
  const double x = (std::sqrt(v) + 1.0) / 4.0;
  const double m = std::floor(x);
  return {static_cast<int>(m), x - m};
}

RadialProfile RadialProfile::sqrt_poincare() {
  RadialProfile p;
  p.kind_ = ProfileKind::sqrt_poincare;
  return p;
}

RadialProfile RadialProfile::explicit_n(int n) {
  if (n < 2) throw DomainError("explicit_n needs n >= 2");
  RadialProfile p;
  p.kind_ = ProfileKind::explicit_n;
  p.n_ = n;
  return p;
}

RadialProfile RadialProfile::phi_v_candidate(double v) {
  if (!(v >= 0.0)) throw DomainError("phi_v_candidate needs v >= 0");
  RadialProfile p;
  p.kind_ = ProfileKind::phi_v_candidate;
  p.v_ = v;
  return p;
}

RadialProfile RadialProfile::taylor_at_one(std::vector<double> coeffs, SeriesVariable var) {
  if (coeffs.size() < 2 || coeffs[0] != 0.0 || !(coeffs[1] > 0.0)) {
    throw NormalizationError("taylor_at_one needs coefficients (0, b1 > 0, ...)");
  }
  const double b1 = coeffs[1];
  for (double& c : coeffs) c /= b1;
  RadialProfile p;
  p.kind_ = ProfileKind::taylor_at_one;
  p.coeffs_ = std::move(coeffs);
  p.variable_ = var;
  return p;
}

RadialProfile RadialProfile::poincare_numeric(std::shared_ptr<const PoincareSolution> solution) {
  if (!solution) throw PreconditionError("poincare_numeric needs a solution");
  RadialProfile p;
  p.kind_ = ProfileKind::poincare_numeric;
  p.solution_ = std::move(solution);
  return p;
}

RadialProfile RadialProfile::constant_one() { return RadialProfile(); }

const PoincareSolution& RadialProfile::solution() const {
  if (!solution_) throw PreconditionError("profile carries no Poincare solution");
  return *solution_;
}

RadialProfile RadialProfile::scaled(double factor) const {
  if (!(factor > 0.0)) throw DomainError("profile scale factor must be positive");
  RadialProfile p = *this;
  p.scale_ *= factor;
  return p;
}

bool RadialProfile::vanishes_at_one() const { return kind_ != ProfileKind::constant_one && scale_ == 1.0; }

double RadialProfile::truncation_indicator(double t) const {
  if (kind_ != ProfileKind::taylor_at_one || variable_ != SeriesVariable::L) return 0.0;
  const double L = -std::log(t);
  return scale_ * std::abs(coeffs_.back()) * std::pow(L, static_cast<double>(coeffs_.size() - 1));
}

std::string RadialProfile::describe() const {
  std::string out(to_string(kind_));
  switch (kind_) {
    case ProfileKind::explicit_n: out += fmt::format(":n={}", n_); break;
    case ProfileKind::phi_v_candidate: out += fmt::format(":v={:.17g}", v_); break;
    case ProfileKind::taylor_at_one: {
      out += ":coeffs=";
      for (std::size_t i = 0; i < coeffs_.size(); ++i) out += fmt::format("{}{:.17g}", i ? "|" : "", coeffs_[i]);
      out += variable_ == SeriesVariable::L ? ",var=L" : ",var=x";
      break;
    }
    case ProfileKind::poincare_numeric: out += fmt::format(":c={:.17g}", solution().c()); break;
    default: break;
  }
  if (scale_ != 1.0) out += fmt::format(" (scaled by {:.17g})", scale_);
  return out;
}

ProfileValue eval_profile(const RadialProfile& p, double t, int order) {
  if (!(t > 0.0 && t < 1.0)) throw DomainError(fmt::format("t = {} outside (0,1)", t));
  return eval_profile_split(p, t, 1.0 - t, order);
}

ProfileValue eval_profile_split(const RadialProfile& p, double t, double omt, int order) {
  check_order(order);
  if (!(t > 0.0) || !(omt > 0.0)) throw DomainError(fmt::format("t = {} outside (0,1)", t));
  ProfileValue v;
  switch (p.kind()) {
    case ProfileKind::sqrt_poincare: {
      const double sq = std::sqrt(t);
      v = {2.0 * omt / (1.0 + sq), -1.0 / sq, 0.5 / (t * sq)};
      break;
    }
    case ProfileKind::explicit_n: {
      const double n = p.n();
      const double a = (n - 1.0) / n;
      const double lt = log_t_of(t, omt);
      v = {-n / (n - 1.0) * std::expm1(a * lt), -std::exp((a - 1.0) * lt), (1.0 - a) * std::exp((a - 2.0) * lt)};
      break;
    }
    case ProfileKind::phi_v_candidate: v = eval_candidate(p.v(), t, omt); break;
    case ProfileKind::taylor_at_one: {
      if (p.variable() == SeriesVariable::x) {
        const ProfileValue d = eval_polynomial(p.coeffs(), omt);
        v = {d.f, -d.fp, d.fpp};
      } else {
        const double L = -log_t_of(t, omt);
        const ProfileValue d = eval_polynomial(p.coeffs(), L);
        v = {d.f, -d.fp / t, (d.fpp + d.fp) / (t * t)};
      }
      break;
    }
    case ProfileKind::poincare_numeric: v = p.solution().evaluate_split(t, omt); break;
    case ProfileKind::constant_one: v = {1.0, 0.0, 0.0}; break;
  }
  if (order < 2) v.fpp = 0.0;
  if (order < 1) v.fp = 0.0;
  return scale_value(v, p.scale());
}

double profile_at_origin(const RadialProfile& p) {
  double f = 0.0;
  switch (p.kind()) {
    case ProfileKind::sqrt_poincare: f = 2.0; break;
    case ProfileKind::explicit_n: f = p.n() / (p.n() - 1.0); break;
    case ProfileKind::phi_v_candidate: {
      const auto [m, delta] = phi_v_index(p.v());
      if (m > 0) throw DomainError("candidate profile is unbounded at t = 0");
      const double p0 = 1.0 - delta * (2.0 * delta - 1.0);
      f = std::cbrt(4.0 / p0);
      break;
    }
    case ProfileKind::taylor_at_one:
      if (p.variable() == SeriesVariable::L) throw DomainError("L-series profile is not defined at t = 0");
      for (double c : p.coeffs()) f += c;
      break;
    case ProfileKind::poincare_numeric: throw DomainError("numeric Poincare profile does not reach t = 0");
    case ProfileKind::constant_one: f = 1.0; break;
  }
  return f * p.scale();
}

double monge_ampere_from_values(const ProfileValue& v, int n, double t) {
  if (n < 2) throw DomainError("n must be >= 2");
  const double sign = n % 2 == 0 ? 1.0 : -1.0;
  const double bracket = v.f * v.fp + t * v.f * v.fpp - t * v.fp * v.fp;
  return sign * t * std::pow(v.fp, n - 1) * bracket;
}

double monge_ampere_density(const RadialProfile& p, int n, double t) {
  return monge_ampere_from_values(eval_profile(p, t, 2), n, t);
}

double monge_ampere_density_split(const RadialProfile& p, int n, double t, double omt) {
  return monge_ampere_from_values(eval_profile_split(p, t, omt, 2), n, t);
}

namespace {

// cosh(y) - sinh(y)/s with y = s L/4, as a series in v = s^2 for small |v|.
double phi_v_bracket_series(double v, double L) {
  const double z = L * L * v / 16.0;
  double even = 0.0, odd = 0.0, zi = 1.0, f2 = 1.0, f3 = 1.0;
  for (int i = 0; i < 4; ++i) {
    if (i > 0) {
      zi *= z;
      f2 *= (2.0 * i - 1.0) * (2.0 * i);
      f3 *= (2.0 * i) * (2.0 * i + 1.0);
    }
    even += zi / f2;
    odd += zi / f3;
  }
  return even - 0.25 * L * odd;
}

double phi_v_bracket(double v, double L, bool negative_root) {
  if (std::abs(v) < 1e-6) return phi_v_bracket_series(v, L);
  if (v < 0.0) {
    const double s = std::sqrt(-v) * (negative_root ? -1.0 : 1.0);
    const double y = 0.25 * s * L;
    return std::cos(y) - std::sin(y) / s;
  }
  const double s = std::sqrt(v) * (negative_root ? -1.0 : 1.0);
  const double y = 0.25 * s * L;
  return std::cosh(y) - std::sinh(y) / s;
}

}  // namespace

double phi_v_branch(double v, double t, bool negative_root) {
  if (!(t > 0.0 && t < 1.0)) throw DomainError(fmt::format("t = {} outside (0,1)", t));
  const double L = -std::log(t);
  return std::exp(0.25 * L) * phi_v_bracket(v, L, negative_root);
}

double phi_v(double v, double t) { return phi_v_branch(v, t, false); }

double phi_v_endpoint_exponent(double v) {
  if (v < 1e-6) return 0.25;
  return 0.25 * (1.0 + std::sqrt(v));
}

double phi_v_regular(double v, double L) {
  if (v < 1e-6) return phi_v_bracket(v, L, false);
  // e^{-y} (cosh y - sinh y / s) = ((1 - 1/s) + (1 + 1/s) e^{-2y}) / 2
  const double s = std::sqrt(v);
  const double e = std::exp(-0.5 * s * L);
  return 0.5 * ((1.0 - 1.0 / s) + (1.0 + 1.0 / s) * e);
}

LogSeries<double> profile_series_at_one(const RadialProfile& p, int order) {
  if (order < 1) throw DomainError("series order must be >= 1");
  LogSeries<double> f(order);
  switch (p.kind()) {
    case ProfileKind::sqrt_poincare:
      f = LogSeries<double>::constant(2.0, order) - exp_linear(-0.5, order) * 2.0;
      break;
    case ProfileKind::explicit_n: {
      const double n = p.n();
      f = (LogSeries<double>::constant(1.0, order) - exp_linear(-(n - 1.0) / n, order)) * (n / (n - 1.0));
      break;
    }
    case ProfileKind::phi_v_candidate: {
      const auto [m, delta] = phi_v_index(p.v());
      const double kappa = delta * (4.0 * m + 2.0 * delta - 1.0);
      const LogSeries<double> t = exp_linear(-1.0, order + 1);
      const LogSeries<double> omt = LogSeries<double>::constant(1.0, order + 1) - t;
      LogSeries<double> quarter_p = (LogSeries<double>::constant(1.0, order + 1) + t * 3.0 + omt * (4.0 * m) -
                                     omt * omt * kappa) *
                                    0.25;
      f = (exp_linear(m / 3.0, order) * omt * power(quarter_p, -1.0 / 3.0)).truncated(order);
      break;
    }
    case ProfileKind::taylor_at_one:
      if (p.variable() == SeriesVariable::L) {
        const auto& c = p.coeffs();
        f = LogSeries<double>::from_coefficients(c, order);
      } else {
        const LogSeries<double> x = LogSeries<double>::constant(1.0, order) - exp_linear(-1.0, order);
        f = compose(LogSeries<double>::from_coefficients(p.coeffs(), order), x);
      }
      break;
    case ProfileKind::poincare_numeric: {
      const LogSeries<double> x = LogSeries<double>::constant(1.0, order) - exp_linear(-1.0, order);
      f = compose(LogSeries<double>::from_coefficients(boundary_series(p.solution().c(), order), order), x);
      break;
    }
    case ProfileKind::constant_one: f = LogSeries<double>::constant(1.0, order); break;
  }
  return f * p.scale();
}

std::vector<double> germ_residual(const RadialProfile& p, double v, int order) {
  if (order < 0) throw DomainError("order must be >= 0");
  const LogSeries<double> phi = density_in_L(profile_series_at_one(p, order + 1), order);
  // a_j of phi_v: sum_i (C(j,2i) - C(j,2i+1)) v^i / (4^j j!)
  auto binom = [](int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double b = 1.0;
    for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
    return b;
  };
  std::vector<double> out;
  double scale = 1.0;  // 4^j j!
  for (int j = 0; j <= order; ++j) {
    if (j > 0) scale *= 4.0 * j;
    double a = 0.0, vi = 1.0;
    for (int i = 0; 2 * i <= j; ++i) {
      if (i > 0) vi *= v;
      a += (binom(j, 2 * i) - binom(j, 2 * i + 1)) * vi;
    }
    out.push_back(phi.coeff(j, 0) - a / scale);
  }
  return out;
}

ProfileSpec parse_profile_spec(std::string_view text) {
  std::string s(text);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  if (!s.empty() && s.front() == '{') {
    try {
      return spec_from_json(json::parse(s));
    } catch (const json::exception& e) {
      throw ConfigError(std::string("malformed profile JSON: ") + e.what());
    }
  }
  ProfileSpec spec;
  const auto colon = s.find(':');
  spec.kind = parse_profile_kind(s.substr(0, colon));
  if (colon == std::string::npos) return spec;
  std::istringstream is(s.substr(colon + 1));
  std::string item;
  while (std::getline(is, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("profile parameter '" + item + "' is not key=value");
    spec.params[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return spec;
}

ProfileSpec load_profile_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open profile file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return spec_from_json(json::parse(buffer.str()));
  } catch (const json::exception& e) {
    throw ConfigError("malformed profile file " + path + ": " + e.what());
  }
}

ProfileSpec merge_specs(const ProfileSpec& base, const ProfileSpec& preferred) {
  ProfileSpec out = preferred;
  if (base.kind == preferred.kind) {
    for (const auto& [key, value] : base.params) out.params.emplace(key, value);
  }
  return out;
}

RadialProfile build_profile(const ProfileSpec& spec) {
  auto allow = [&](std::initializer_list<const char*> keys) {
    for (const auto& [key, value] : spec.params) {
      bool ok = false;
      for (const char* k : keys) ok = ok || key == k;
      if (!ok) throw ConfigError(fmt::format("profile {} has no parameter '{}'", to_string(spec.kind), key));
    }
  };
  switch (spec.kind) {
    case ProfileKind::sqrt_poincare: allow({}); return RadialProfile::sqrt_poincare();
    case ProfileKind::constant_one: allow({}); return RadialProfile::constant_one();
    case ProfileKind::explicit_n: {
      allow({"n"});
      const double n = param_double(spec, "n", 2.0);
      if (n != std::floor(n) || n < 2) throw ConfigError("explicit_n needs an integer n >= 2");
      return RadialProfile::explicit_n(static_cast<int>(n));
    }
    case ProfileKind::phi_v_candidate: {
      allow({"v"});
      const double v = param_double(spec, "v", 1.0);
      if (v < 0) throw ConfigError("phi_v_candidate needs v >= 0");
      return RadialProfile::phi_v_candidate(v);
    }
    case ProfileKind::taylor_at_one: {
      allow({"coeffs", "var"});
      auto it = spec.params.find("coeffs");
      if (it == spec.params.end()) throw ConfigError("taylor_at_one needs coeffs");
      SeriesVariable var = SeriesVariable::L;
      if (auto v = spec.params.find("var"); v != spec.params.end()) {
        if (v->second == "x") {
          var = SeriesVariable::x;
        } else if (v->second != "L") {
          throw ConfigError("taylor_at_one var must be L or x");
        }
      }
      try {
        return RadialProfile::taylor_at_one(parse_number_list(it->second), var);
      } catch (const NormalizationError& e) {
        throw ConfigError(e.what());
      }
    }
    case ProfileKind::poincare_numeric: {
      allow({"c", "tmin"});
      const double c = param_double(spec, "c", 0.0);
      const double tmin = param_double(spec, "tmin", 1e-6);
      if (!(tmin > 0.0 && tmin < 1.0)) throw ConfigError("tmin must lie in (0,1)");
      return RadialProfile::poincare_numeric(std::make_shared<PoincareSolution>(solve_poincare(c, tmin)));
    }
  }
  throw ConfigError("unsupported profile kind");
}

RadialProfile parse_profile(std::string_view text) { return build_profile(parse_profile_spec(text)); }

}  // namespace kb
