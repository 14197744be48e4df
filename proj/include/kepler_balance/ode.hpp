#pragma once

// Dormand-Prince 5(4) integrator with cubic Hermite dense output and event location.
// Integration may run towards decreasing x.

#include "kepler_balance/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

namespace kb {

struct OdeOptions {
  double rtol = 1e-12;
  double atol = 1e-12;
  double h_init = 1e-6;
  double h_min = 1e-15;  // relative to max(1, |x|)
  double h_max = std::numeric_limits<double>::infinity();
  std::size_t max_steps = 2'000'000;
};

template <std::size_t N>
struct OdeNode {
  double x;
  std::array<double, N> y;
  std::array<double, N> dy;
};

/// Accepted nodes with Hermite interpolation between them.
template <std::size_t N>
class OdeTrajectory {
 public:
  using State = std::array<double, N>;

  const std::vector<OdeNode<N>>& nodes() const { return nodes_; }
  std::vector<OdeNode<N>>& nodes() { return nodes_; }
  bool empty() const { return nodes_.empty(); }
  const OdeNode<N>& front() const { return nodes_.front(); }
  const OdeNode<N>& back() const { return nodes_.back(); }

  /// Index i such that x lies between nodes i and i+1; x must lie within the integrated range.
  std::size_t segment(double x) const {
    if (nodes_.size() < 2) throw DomainError("trajectory has fewer than two nodes");
    const bool forward = nodes_.back().x > nodes_.front().x;
    const double lo = forward ? nodes_.front().x : nodes_.back().x;
    const double hi = forward ? nodes_.back().x : nodes_.front().x;
    if (x < lo || x > hi) throw DomainError("interpolation point outside the integrated range");
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), x, [forward](const OdeNode<N>& n, double v) {
      return forward ? n.x < v : n.x > v;
    });
    if (it == nodes_.begin()) ++it;
    if (it == nodes_.end()) --it;
    return static_cast<std::size_t>(it - nodes_.begin()) - 1;
  }

  /// Cubic Hermite interpolation of state and derivative at x.
  std::pair<State, State> at(double x) const {
    if (nodes_.size() == 1 && x == nodes_.front().x) return {nodes_.front().y, nodes_.front().dy};
    const std::size_t seg = segment(x);
    const OdeNode<N>& a = nodes_[seg];
    const OdeNode<N>& b = nodes_[seg + 1];
    const double h = b.x - a.x;
    const double s = (x - a.x) / h;
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
    const double h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s);
    const double h11 = s * s * (s - 1);
    const double d00 = 6 * s * s - 6 * s;
    const double d10 = 3 * s * s - 4 * s + 1;
    const double d11 = 3 * s * s - 2 * s;
    State y{};
    State dy{};
    for (std::size_t i = 0; i < N; ++i) {
      y[i] = h00 * a.y[i] + h10 * h * a.dy[i] + h01 * b.y[i] + h11 * h * b.dy[i];
      dy[i] = (d00 * a.y[i] - d00 * b.y[i]) / h + d10 * a.dy[i] + d11 * b.dy[i];
    }
    return {y, dy};
  }

 private:
  std::vector<OdeNode<N>> nodes_;
};

template <std::size_t N>
struct OdeResult {
  OdeTrajectory<N> trajectory;
  bool event_hit = false;
};

template <std::size_t N, class Rhs>
class DormandPrince5 {
 public:
  using State = std::array<double, N>;

  DormandPrince5(Rhs rhs, OdeOptions options) : rhs_(std::move(rhs)), options_(options) {}

  /// One step of size h from (x, y) with derivative dy; returns the new state, its derivative
  /// and the embedded error estimate.
  void step(double x, const State& y, const State& dy, double h, State& y1, State& dy1, State& err) const {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                            b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                            e6 = 22.0 / 525, e7 = -1.0 / 40;
    State tmp{};
    const State& k1 = dy;
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * a21 * k1[i];
    const State k2 = rhs_(x + c2 * h, tmp);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    const State k3 = rhs_(x + c3 * h, tmp);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    const State k4 = rhs_(x + c4 * h, tmp);
    for (std::size_t i = 0; i < N; ++i) {
      tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    }
    const State k5 = rhs_(x + c5 * h, tmp);
    for (std::size_t i = 0; i < N; ++i) {
      tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    }
    const State k6 = rhs_(x + h, tmp);
    for (std::size_t i = 0; i < N; ++i) {
      y1[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    }
    dy1 = rhs_(x + h, y1);
    for (std::size_t i = 0; i < N; ++i) {
      err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * dy1[i]);
    }
  }

  /// Integrates from x0 to x_end. `event(x, y)` is monitored at accepted nodes; on a sign change
  /// the crossing is located by regula falsi on genuine sub-steps and the run stops there.
  template <class Event>
  OdeResult<N> integrate(double x0, const State& y0, double x_end, Event&& event) const {
    OdeResult<N> result;
    auto& nodes = result.trajectory.nodes();
    const double dir = x_end >= x0 ? 1.0 : -1.0;
    State dy0 = rhs_(x0, y0);
    nodes.push_back({x0, y0, dy0});
    double g_prev = event(x0, y0);
    double h = std::min(options_.h_init, std::abs(x_end - x0));
    std::size_t steps = 0;
    State y1{}, dy1{}, err{};
    while (dir * (x_end - nodes.back().x) > 0.0) {
      if (++steps > options_.max_steps) throw IntegrationError("ODE step budget exhausted");
      const OdeNode<N> cur = nodes.back();
      const double remaining = std::abs(x_end - cur.x);
      bool last = false;
      if (h >= remaining) {
        h = remaining;
        last = true;
      }
      step(cur.x, cur.y, cur.dy, dir * h, y1, dy1, err);
      const double e = error_norm(cur.y, y1, err);
      if (!(e <= 1.0)) {
        const double factor = std::isfinite(e) ? std::max(0.2, 0.9 * std::pow(e, -0.2)) : 0.1;
        h *= factor;
        if (h < options_.h_min * std::max(1.0, std::abs(cur.x))) {
          throw IntegrationError("ODE step size underflow at x = " + std::to_string(cur.x));
        }
        continue;
      }
      const double x1 = last ? x_end : cur.x + dir * h;
      const double g1 = event(x1, y1);
      if ((g_prev > 0.0 && g1 <= 0.0) || (g_prev < 0.0 && g1 >= 0.0)) {
        nodes.push_back(locate(cur, dir * h, g_prev, g1, event));
        result.event_hit = true;
        return result;
      }
      nodes.push_back({x1, y1, dy1});
      g_prev = g1;
      const double grow = e == 0.0 ? 5.0 : std::min(5.0, std::max(0.2, 0.9 * std::pow(e, -0.2)));
      h = std::min(h * grow, options_.h_max);
    }
    return result;
  }

  OdeResult<N> integrate(double x0, const State& y0, double x_end) const {
    return integrate(x0, y0, x_end, [](double, const State&) { return 1.0; });
  }

 private:
  double error_norm(const State& y0, const State& y1, const State& err) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sc = options_.atol + options_.rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
      sum += (err[i] / sc) * (err[i] / sc);
    }
    return std::sqrt(sum / static_cast<double>(N));
  }

  template <class Event>
  OdeNode<N> locate(const OdeNode<N>& start, double h, double g0, double g1, Event&& event) const {
    // Illinois variant of regula falsi on the fraction theta of the step.
    double lo = 0.0, hi = 1.0, glo = g0, ghi = g1;
    int side = 0;
    OdeNode<N> best{start.x + h, {}, {}};
    State y1{}, dy1{}, err{};
    step(start.x, start.y, start.dy, h, y1, dy1, err);
    best.y = y1;
    best.dy = dy1;
    for (int it = 0; it < 200; ++it) {
      double theta = (lo * ghi - hi * glo) / (ghi - glo);
      if (!(theta > lo && theta < hi)) theta = 0.5 * (lo + hi);
      step(start.x, start.y, start.dy, theta * h, y1, dy1, err);
      const double g = event(start.x + theta * h, y1);
      best = {start.x + theta * h, y1, dy1};
      if (g == 0.0 || (hi - lo) * std::abs(h) <= 1e-16 * std::max(1.0, std::abs(start.x))) break;
      if ((g > 0.0) == (glo > 0.0)) {
        lo = theta;
        glo = g;
        if (side == -1) ghi *= 0.5;
        side = -1;
      } else {
        hi = theta;
        ghi = g;
        if (side == 1) glo *= 0.5;
        side = 1;
      }
    }
    return best;
  }

  Rhs rhs_;
  OdeOptions options_;
};

template <std::size_t N, class Rhs>
DormandPrince5<N, Rhs> make_dormand_prince(Rhs rhs, OdeOptions options) {
  return DormandPrince5<N, Rhs>(std::move(rhs), options);
}

}  // namespace kb
