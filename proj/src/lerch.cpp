#include "kepler_balance/lerch.hpp"

#include "kepler_balance/error.hpp"
#include "kepler_balance/special.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace kb {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double factorial(int n) { return std::tgamma(n + 1.0); }

bool is_positive_integer(double s) { return s >= 1.0 && s == std::floor(s); }

// Neumaier-compensated accumulator.
struct Accumulator {
  double sum = 0.0;
  double comp = 0.0;
  void add(double x) {
    const double t = sum + x;
    comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

// sum_{k>=0, k != skip} (-1)^k zeta^{(n)}(s-k) L^k / k!, summed until the terms are negligible.
double zeta_regular_sum(double s, int n, double L, int skip) {
  constexpr int kMaxTerms = 5000;
  const double logL = std::log(L);
  Accumulator acc;
  double prev = INFINITY;
  double peak = 0.0;
  for (int k = 0; k < kMaxTerms; ++k) {
    double term = 0.0;
    if (k != skip) {
      const double scale = k * logL - std::lgamma(k + 1.0);
      term = zeta_jet(s - k, n, scale).derivative(n);
      if (k % 2 == 1) term = -term;
    }
    acc.add(term);
    peak = std::max(peak, std::abs(term));
    const double here = std::abs(term) + std::abs(prev);
    if (k > 2 && here <= 1e-17 * std::max(std::abs(acc.value()), 1e-3 * peak)) return acc.value();
    prev = term;
  }
  throw ConvergenceError(fmt::format("zeta series for s = {}, n = {} at L = {} did not converge", s, n, L));
}

}  // namespace

// --- context ---------------------------------------------------------------------------------

LerchContext::LerchContext(int max_m, int max_j) : max_m_(max_m), max_j_(max_j) {
  if (max_m < 0 || max_j < 0 || max_m > kMaxIndex || max_j > kMaxIndex)
    throw DomainError(fmt::format("Lerch tables support 0 <= m, j <= {} (got m = {}, j = {})", kMaxIndex, max_m, max_j));
  gamma_ = stieltjes_table();
  const int degree = Jet::kMaxDegree;
  // Gamma(1 - z) as a jet in z.
  const Jet g = gamma_jet(1.0, degree).reflected();
  c_.assign(static_cast<std::size_t>(max_m + 1), std::vector<double>(static_cast<std::size_t>(max_j + 1), 0.0));
  for (int j = 0; j <= max_j; ++j) c_[0][static_cast<std::size_t>(j)] = g.derivative(j);
  // Gamma(1-m-z) = -H(z)/z with H(z) = Gamma(1-z) / prod_{q=1}^{m-1} (-q - z).
  Jet denom(degree, 1.0);
  for (int m = 1; m <= max_m; ++m) {
    if (m >= 2) {
      Jet lin(degree, -(m - 1.0));
      lin[1] = -1.0;
      denom *= lin;
    }
    const Jet H = g * reciprocal(denom);
    for (int j = 0; j <= max_j; ++j)
      c_[static_cast<std::size_t>(m)][static_cast<std::size_t>(j)] = -factorial(j) * H[j + 1];
  }
}

double LerchContext::stieltjes(int j) const {
  if (j < 0 || j > kMaxIndex) throw CapabilityError(fmt::format("Stieltjes constant gamma_{} not tabulated", j));
  return gamma_[static_cast<std::size_t>(j)];
}

double LerchContext::c(int m, int j) const {
  if (m < 0 || m > max_m_ || j < 0 || j > max_j_)
    throw CapabilityError(fmt::format("Gamma-Laurent coefficient c_({},{}) outside the tables (m <= {}, j <= {})", m, j,
                                      max_m_, max_j_));
  return c_[static_cast<std::size_t>(m)][static_cast<std::size_t>(j)];
}

double LerchContext::gamma_derivative(double x, int n) const {
  if (n == 0) return std::tgamma(x);
  return kb::gamma_derivative(x, n);
}

double LerchContext::recurrence_residual() const {
  double worst = 0.0;
  auto record = [&](double residual, std::initializer_list<double> parts) {
    double scale = 1.0;
    for (double p : parts) scale = std::max(scale, std::abs(p));
    worst = std::max(worst, std::abs(residual) / scale);
  };
  for (int j = 0; j + 1 <= max_j_ && max_m_ >= 1; ++j) {
    const double lhs = c(1, j);
    const double rhs = -c(0, j + 1) / (j + 1);
    record(lhs - rhs, {lhs, rhs});
  }
  for (int m = 1; m + 1 <= max_m_; ++m) {
    const double base = std::pow(-1.0, m) / (factorial(m) * m);
    record(c(m + 1, 0) - (base - c(m, 0) / m), {c(m + 1, 0), base, c(m, 0) / m});
    for (int j = 1; j <= max_j_; ++j) {
      const double a = c(m, j) / m;
      const double b = j * c(m + 1, j - 1) / m;
      record(c(m + 1, j) + a + b, {c(m + 1, j), a, b});
    }
  }
  return worst;
}

LerchContext stieltjes_gamma_tables(int max_m, int max_j) { return LerchContext(max_m, max_j); }

const LerchContext& default_lerch_context() {
  static const LerchContext ctx(LerchContext::kMaxIndex, LerchContext::kMaxIndex);
  return ctx;
}

// --- direct summation ------------------------------------------------------------------------

double lerch_phi(double t, double s, int n_deriv) {
  if (!(t >= 0.0 && t < 1.0)) throw DomainError(fmt::format("Lerch sum needs 0 <= t < 1, got {}", t));
  if (n_deriv < 0) throw DomainError("derivative order must be >= 0");
  if (t == 0.0) return n_deriv == 0 ? 1.0 : 0.0;
  constexpr long kMaxTerms = 1'000'000;
  const double log_t = std::log(t);
  Accumulator acc;
  for (long k = 0; k < kMaxTerms; ++k) {
    const double K = k + 1.0;
    const double logK = std::log(K);
    const double term = std::exp(k * log_t - s * logK) * std::pow(-logK, n_deriv);
    acc.add(term);
    if (k == 0) continue;
    // Ratios |a_{i+1}/a_i| decrease in i; bound the tail by a geometric series from a_k.
    double r = t * std::max(1.0, std::pow(K / (K + 1.0), s));
    if (n_deriv > 0) r *= std::pow(std::log(K + 1.0) / logK, n_deriv);
    if (r < 1.0) {
      const double tail = std::abs(term) * r / (1.0 - r);
      if (tail <= 1e-17 * std::abs(acc.value()) || tail < 1e-300) break;
    }
  }
  return acc.value();
}

// --- boundary expansion ----------------------------------------------------------------------

LerchExpansion lerch_singular_part(double s, int n, const LerchContext& ctx) {
  if (n < 0) throw DomainError("derivative order must be >= 0");
  LerchExpansion e;
  e.s = s;
  e.n = n;
  e.radius = kTwoPi;
  if (is_positive_integer(s)) {
    const int m = static_cast<int>(s);
    if (m > ctx.max_m() || n > ctx.max_j())
      throw CapabilityError(
          fmt::format("expansion at s = {}, n = {} needs Gamma-Laurent data beyond the tables", m, n));
    e.singular.assign(static_cast<std::size_t>(n + 2), 0.0);
    for (int j = 0; j <= n; ++j) e.singular[static_cast<std::size_t>(j)] = binom(n, j) * ctx.c(m, n - j);
    const double pre = std::pow(-1.0, m - 1) / factorial(m - 1);
    // The Stieltjes term enters with the sign of zeta^{(n)}(1+z) in the standard convention.
    e.singular[0] += pre * std::pow(-1.0, n) * ctx.stieltjes(n);
    e.singular[static_cast<std::size_t>(n + 1)] = -pre / (n + 1);
  } else {
    e.singular.assign(static_cast<std::size_t>(n + 1), 0.0);
    for (int j = 0; j <= n; ++j)
      e.singular[static_cast<std::size_t>(j)] =
          binom(n, j) * std::pow(-1.0, n - j) * ctx.gamma_derivative(1.0 - s, n - j);
  }
  return e;
}

LerchExpansion lerch_boundary_expansion(double s, int n, int order, const LerchContext& ctx) {
  LerchExpansion e = lerch_singular_part(s, n, ctx);
  const int skip = is_positive_integer(s) ? static_cast<int>(s) - 1 : -1;
  e.regular.assign(static_cast<std::size_t>(std::max(order, 0) + 1), 0.0);
  for (int k = 0; k <= order; ++k) {
    if (k == skip) continue;
    const double v = zeta_jet(s - k, n, -std::lgamma(k + 1.0)).derivative(n);
    e.regular[static_cast<std::size_t>(k)] = k % 2 == 0 ? v : -v;
  }
  return e;
}

double LerchExpansion::evaluate(double L) const {
  if (!(L > 0.0 && L < radius)) throw CapabilityError(fmt::format("expansion evaluated outside 0 < L < 2 pi: {}", L));
  const double logL = std::log(L);
  double sing = 0.0;
  for (std::size_t j = singular.size(); j-- > 0;) sing = sing * logL + singular[j];
  double reg = 0.0;
  for (std::size_t k = regular.size(); k-- > 0;) reg = reg * L + regular[k];
  return std::pow(L, s - 1.0) * sing + reg;
}

LogSeries<double> LerchExpansion::series() const {
  if (s != std::floor(s)) throw CapabilityError("only integer s expansions are power-log series in L");
  const int order = static_cast<int>(regular.size()) - 1;
  const int p = static_cast<int>(s) - 1;
  LogSeries<double> out(std::max(order, p));
  // (log L)^j = (-1)^j (log 1/L)^j
  for (std::size_t j = 0; j < singular.size(); ++j) out.add(p, static_cast<int>(j), (j % 2 == 0 ? 1.0 : -1.0) * singular[j]);
  for (std::size_t k = 0; k < regular.size(); ++k) out.add(static_cast<int>(k), 0, regular[k]);
  return out;
}

double lerch_phi_boundary(double t, double s, int n, const LerchContext& ctx) {
  if (!(t > 0.0 && t < 1.0)) throw DomainError(fmt::format("boundary expansion needs 0 < t < 1, got {}", t));
  const double L = -std::log(t);
  if (L >= kTwoPi) throw CapabilityError(fmt::format("boundary expansion diverges for L = {} >= 2 pi", L));
  const LerchExpansion e = lerch_singular_part(s, n, ctx);
  const int skip = is_positive_integer(s) ? static_cast<int>(s) - 1 : -1;
  const double logL = std::log(L);
  double sing = 0.0;
  for (std::size_t j = e.singular.size(); j-- > 0;) sing = sing * logL + e.singular[j];
  const double tphi = std::pow(L, s - 1.0) * sing + zeta_regular_sum(s, n, L, skip);
  return tphi / t;
}

double lerch_integer_formula(int m, double L) {
  if (m < 1) throw DomainError(fmt::format("integer formula needs m >= 1, got {}", m));
  if (!(L > 0.0 && L < kTwoPi)) throw CapabilityError(fmt::format("integer formula needs 0 < L < 2 pi, got {}", L));
  const double pre = 1.0 / factorial(m - 1);
  const double pw = std::pow(L, m - 1);
  const double log_term = (m % 2 == 0 ? pre : -pre) * pw * std::log(L);
  const double primed = ((m - 1) % 2 == 0 ? pre : -pre) * harmonic(m - 1) * pw;
  return log_term + primed + zeta_regular_sum(static_cast<double>(m), 0, L, m - 1);
}

}  // namespace kb
