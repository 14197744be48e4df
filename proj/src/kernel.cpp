#include "kepler_balance/kernel.hpp"

#include "kepler_balance/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace kb {

// --- Density ---------------------------------------------------------------------------------

Density Density::constant_one() {
  Density d;
  d.name_ = "constant_one";
  d.regular_ = [](const QuadNode&) { return 1.0; };
  d.is_constant_one_ = true;
  return d;
}

Density Density::phi_v(double v) {
  Density d;
  d.name_ = fmt::format("phi_v(v={})", v);
  d.exponent_ = phi_v_endpoint_exponent(v);
  d.regular_ = [v](const QuadNode& node) { return phi_v_regular(v, -node.log_t); };
  // The regular part stays positive for v >= 0; oscillation sets in below.
  d.possibly_negative_ = v < 0.0;
  return d;
}

Density Density::monge_ampere(RadialProfile profile, int n) {
  if (n < 1) throw DomainError(fmt::format("dimension n must be >= 1, got {}", n));
  Density d;
  d.name_ = fmt::format("W[{}], n={}", profile.describe(), n);
  d.regular_ = [p = std::move(profile), n](const QuadNode& node) {
    return monge_ampere_density_split(p, n, node.t, node.omt);
  };
  d.possibly_negative_ = true;
  return d;
}

Density Density::custom(std::string name, Regular regular, double endpoint_exponent, bool possibly_negative) {
  Density d;
  d.name_ = std::move(name);
  d.regular_ = std::move(regular);
  d.exponent_ = endpoint_exponent;
  d.possibly_negative_ = possibly_negative;
  return d;
}

int Density::k_min() const {
  if (exponent_ < 1.0) return 0;
  return static_cast<int>(std::floor(exponent_ - 1.0)) + 1;
}

double Density::operator()(double t) const {
  if (!(t > 0.0 && t < 1.0)) throw DomainError(fmt::format("density evaluated outside (0,1): t = {}", t));
  const QuadNode node{t, 1.0 - t, std::log(t), 0.0};
  return std::exp(-exponent_ * node.log_t) * regular_(node);
}

std::optional<double> Density::exact_moment(int k) const {
  if (is_constant_one_) return 1.0 / (k + 1.0);
  return std::nullopt;
}

// --- moments ---------------------------------------------------------------------------------

double MomentSequence::at(int k) const {
  if (k < k_min)
    throw DivergenceError(fmt::format("moment c_{} diverges; first finite moment is k = {}", k, k_min), k_min);
  auto it = values.find(k);
  if (it == values.end()) throw std::out_of_range(fmt::format("moment c_{} not computed", k));
  return it->second.value;
}

MomentEngine::MomentEngine(Density density, double tol) : density_(std::move(density)), tol_(tol) {
  const auto& rule = TanhSinh::instance();
  regular_.resize(TanhSinh::kMaxLevel + 1);
  for (int l = 0; l <= TanhSinh::kMaxLevel; ++l) {
    const auto& nodes = rule.nodes(l);
    auto& out = regular_[static_cast<std::size_t>(l)];
    out.resize(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      double r = density_.regular(nodes[i]);
      // Derivatives of some profiles overflow at nodes within 1e-200 of the origin, where the
      // node weight already makes any bounded contribution vanish.
      if (!std::isfinite(r)) r = 0.0;
      if (r < 0.0) negative_ = true;
      out[i] = r;
    }
  }
}

MomentEntry MomentEngine::compute(int k) const {
  if (k < density_.k_min())
    throw DivergenceError(
        fmt::format("moment c_{} of {} diverges; first finite moment is k = {}", k, density_.name(), density_.k_min()),
        density_.k_min());
  if (auto exact = density_.exact_moment(k)) return {*exact, 0.0};
  const auto& rule = TanhSinh::instance();
  const double power = k - density_.endpoint_exponent();
  auto level_sum = [&](int l) {
    const auto& nodes = rule.nodes(l);
    const auto& reg = regular_[static_cast<std::size_t>(l)];
    double s = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const double r = reg[i];
      if (r == 0.0) continue;
      s += nodes[i].weight * std::exp(power * nodes[i].log_t) * r;
    }
    return s;
  };
  double value = level_sum(0);
  double error = std::numeric_limits<double>::infinity();
  for (int l = 1; l <= TanhSinh::kMaxLevel; ++l) {
    const double next = 0.5 * value + level_sum(l);
    error = std::abs(next - value);
    value = next;
    if (l >= 3 && error <= std::max(tol_, 1e-15 * std::abs(value))) return {value, error};
  }
  throw ConvergenceError(fmt::format("moment c_{} of {} did not reach tolerance {:g} (last change {:g})", k,
                                     density_.name(), tol_, error));
}

void MomentEngine::ensure(int k_max, Execution mode) {
  const int k0 = density_.k_min();
  if (k_max < k0)
    throw DivergenceError(
        fmt::format("no finite moments up to k = {} for {}; first finite moment is k = {}", k_max, density_.name(), k0),
        k0);
  const int have = static_cast<int>(values_.size());
  const int need = k_max - k0 + 1;
  if (need <= have) return;
  values_.resize(static_cast<std::size_t>(need));
  if (mode == Execution::parallel) {
    // Exceptions may not leave an OpenMP region; the first failing index is rethrown afterwards.
    int failed = need;
    std::string message;
#pragma omp parallel for schedule(dynamic, 16) num_threads(thread_count())
    for (int i = have; i < need; ++i) {
      try {
        values_[static_cast<std::size_t>(i)] = compute(k0 + i);
      } catch (const std::exception& e) {
#pragma omp critical(kb_moment_failure)
        if (i < failed) {
          failed = i;
          message = e.what();
        }
      }
    }
    if (failed < need) {
      values_.resize(static_cast<std::size_t>(failed));
      throw ConvergenceError(message);
    }
  } else {
    for (int i = have; i < need; ++i) {
      try {
        values_[static_cast<std::size_t>(i)] = compute(k0 + i);
      } catch (...) {
        values_.resize(static_cast<std::size_t>(i));
        throw;
      }
    }
  }
}

MomentEntry MomentEngine::moment(int k) {
  if (k < density_.k_min()) return compute(k);  // throws
  ensure(k, Execution::serial);
  return values_[static_cast<std::size_t>(k - density_.k_min())];
}

MomentSequence moments(const Density& density, int k_max, double tol, Execution mode) {
  MomentEngine engine(density, tol);
  engine.ensure(k_max, mode);
  MomentSequence seq;
  seq.k_min = density.k_min();
  seq.signed_density = engine.saw_negative_values();
  for (int k = seq.k_min; k <= k_max; ++k) seq.values.emplace(k, engine.moment(k));
  return seq;
}

double moment(const Density& density, int k, double tol) {
  MomentEngine engine(density, tol);
  return engine.compute(k).value;
}

// --- dimension counts and closed forms -------------------------------------------------------

namespace {

unsigned __int128 binomial128(long long a, long long b) {
  if (b < 0 || a < b) return 0;
  b = std::min(b, a - b);
  unsigned __int128 r = 1;
  for (long long i = 1; i <= b; ++i) {
    r = r * static_cast<unsigned __int128>(a - b + i) / static_cast<unsigned __int128>(i);
    if (r > std::numeric_limits<std::uint64_t>::max())
      throw DomainError(fmt::format("binomial C({}, {}) overflows 64 bits", a, b));
  }
  return r;
}

double binomial_real(double a, int b) {
  if (b < 0 || a < b) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= b; ++i) r *= (a - b + i) / i;
  return r;
}

}  // namespace

std::uint64_t dimension_count(int k, int n) {
  if (k < 0 || n < 1) throw DomainError(fmt::format("dimension_count needs k >= 0, n >= 1 (k={}, n={})", k, n));
  const auto total = binomial128(k + n - 1, n - 1) + binomial128(k + n - 2, n - 1);
  if (total > std::numeric_limits<std::uint64_t>::max()) throw DomainError("dimension count overflows 64 bits");
  return static_cast<std::uint64_t>(total);
}

double dimension_count_real(int k, int n) {
  return binomial_real(k + n - 1.0, n - 1) + binomial_real(k + n - 2.0, n - 1);
}

double moment_phi_v_closed(double v, int k) {
  if (v < 0.0) throw CapabilityError(fmt::format("closed-form moments need v >= 0, got {}", v));
  const auto [m, delta] = phi_v_index(v);
  if (k < m)
    throw DivergenceError(fmt::format("moment c_{} of phi_v diverges for v = {}; first finite is k = {}", k, v, m), m);
  const double md = m + delta;
  return (2.0 * k + 1.0) / ((2.0 * k + 2.0 * md + 1.0) * (k + 1.0 - md));
}

std::optional<Rational> moment_phi_v_exact(const Rational& v, int k) {
  if (v < 0) throw CapabilityError("closed-form moments need v >= 0");
  auto s = exact_sqrt(v);
  if (!s) return std::nullopt;
  const Rational x = (*s + 1) / 4;
  const BigInt m = boost::multiprecision::numerator(x) / boost::multiprecision::denominator(x);
  if (BigInt(k) < m)
    throw DivergenceError(fmt::format("moment c_{} of phi_v diverges; first finite is k = {}", k, m.str()),
                          static_cast<int>(m));
  const Rational kk(k);
  return (2 * kk + 1) / ((2 * kk + 2 * x + 1) * (kk + 1 - x));
}

double closed_form_F_phi_v(double v, double t) {
  if (!(t >= 0.0 && t < 1.0)) throw DomainError(fmt::format("t must lie in [0,1), got {}", t));
  const auto [m, delta] = phi_v_index(v);
  const double u = 1.0 - t;
  const double num = 1.0 + 3.0 * t + 4.0 * m * u - delta * (4.0 * m + 2.0 * delta - 1.0) * u * u;
  return std::pow(t, m) * num / (u * u * u);
}

// --- kernel ----------------------------------------------------------------------------------

KernelEvaluator::KernelEvaluator(Density density, int n, double moment_tol)
    : engine_(std::move(density), moment_tol), n_(n) {
  if (n < 1) throw DomainError(fmt::format("dimension n must be >= 1, got {}", n));
}

double KernelEvaluator::term(int k) {
  const int idx = k + n_ - 2;
  if (idx < engine_.density().k_min()) return 0.0;
  return dimension_count_real(k, n_) / engine_.moment(idx).value;
}

KernelEval KernelEvaluator::evaluate(double t, double tol) {
  if (!(t >= 0.0 && t < 1.0)) throw DomainError(fmt::format("kernel evaluated outside [0,1): t = {}", t));
  constexpr int kMaxTerms = 1'000'000;
  const int k0 = engine_.density().k_min();
  if (t == 0.0) {
    if (n_ - 2 < k0) engine_.ensure(k0, Execution::serial);
    return {t, term(0), 1, 0.0};
  }
  int K = 64;
  double sum = 0.0;
  double power = 1.0;
  double cmax = 0.0;
  int next = 0;  // first index not yet summed
  for (;;) {
    engine_.ensure(std::max(K + n_ - 2, k0), Execution::parallel);
    for (; next <= K; ++next) {
      const double a = term(next);
      sum += a * power;
      power *= t;
      cmax = std::max(cmax, std::abs(a) / std::pow(next + 1.0, n_));
    }
    const double C = 2.0 * cmax;
    const double q = std::pow((K + 3.0) / (K + 2.0), n_) * t;
    const double bound = q < 1.0 ? C * std::pow(K + 2.0, n_) * std::pow(t, K + 1) / (1.0 - q)
                                 : std::numeric_limits<double>::infinity();
    if (bound <= tol * std::max(1.0, std::abs(sum))) return {t, sum, K + 1, bound};
    if (K >= kMaxTerms)
      throw ConvergenceError(fmt::format("kernel series at t = {} not converged after {} terms (tail bound {:g})", t,
                                         K + 1, bound));
    // Aim for the index where C k^n t^k drops below the target, then at least double.
    const double target = tol * std::max(1.0, std::abs(sum)) * (1.0 - t);
    int guess = 2 * K;
    if (C > 0.0) {
      const double lt = std::log(t);
      double k = K;
      for (int it = 0; it < 50; ++it) k = (std::log(target / C) - n_ * std::log(k + 2.0)) / lt;
      if (std::isfinite(k)) guess = std::max(guess, static_cast<int>(std::min(k * 1.1 + 16.0, 2e6)));
    }
    K = std::min(guess, kMaxTerms);
  }
}

KernelEval kernel_series(const Density& density, int n, double t, double tol) {
  KernelEvaluator ev(density, n);
  return ev.evaluate(t, tol);
}

Density default_density(const RadialProfile& p, int n) {
  if (p.kind() == ProfileKind::constant_one) return Density::constant_one();
  if (p.kind() == ProfileKind::phi_v_candidate && n == 2) return Density::phi_v(p.v());
  return Density::monge_ampere(p, n);
}

DefectResult balanced_defect(KernelEvaluator& kernel, const RadialProfile& p, double c, double t) {
  if (!(t >= 0.0 && t < 1.0)) throw DomainError(fmt::format("t must lie in [0,1), got {}", t));
  const double f = t == 0.0 ? profile_at_origin(p) : eval_profile(p, t, 0).f;
  const auto F = kernel.evaluate(t);
  const double value = F.value - c / std::pow(f, kernel.n() + 1);
  return {value, F.value, c, f, kernel.engine().saw_negative_values()};
}

DefectResult balanced_defect(const RadialProfile& p, int n, std::optional<double> c, double t) {
  KernelEvaluator kernel(default_density(p, n), n);
  const double cc = c ? *c : estimate_c(kernel, p).c;
  return balanced_defect(kernel, p, cc, t);
}

CEstimate estimate_c(KernelEvaluator& kernel, const RadialProfile& p, double h0, int levels) {
  if (levels < 2) throw DomainError("estimate_c needs at least two levels");
  CEstimate out;
  std::vector<std::vector<double>> R(static_cast<std::size_t>(levels));
  for (int i = 0; i < levels; ++i) {
    const double omt = std::ldexp(h0, -i);
    const double t = 1.0 - omt;
    const double f = eval_profile_split(p, t, omt, 0).f;
    const double F = kernel.evaluate(t).value;
    out.raw.push_back(std::pow(f, kernel.n() + 1) * F);
    auto& row = R[static_cast<std::size_t>(i)];
    row.push_back(out.raw.back());
    for (int j = 1; j <= i; ++j) {
      const double s = std::ldexp(1.0, j);
      row.push_back((s * row[static_cast<std::size_t>(j - 1)] - R[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)]) /
                    (s - 1.0));
    }
    out.diagonal.push_back(row.back());
  }
  out.c = out.diagonal.back();
  const double spread = std::abs(out.diagonal[out.diagonal.size() - 1] - out.diagonal[out.diagonal.size() - 2]);
  if (!std::isfinite(out.c) || spread > 1e-3)
    throw EstimationError(fmt::format("Richardson estimate of c did not settle: last diagonal entries {} and {}",
                                      out.diagonal[out.diagonal.size() - 2], out.diagonal.back()));
  return out;
}

CEstimate estimate_c(const RadialProfile& p, int n) {
  KernelEvaluator kernel(default_density(p, n), n);
  return estimate_c(kernel, p);
}

}  // namespace kb
