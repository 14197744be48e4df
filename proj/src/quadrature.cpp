#include "kepler_balance/quadrature.hpp"

#include <cmath>

namespace kb {

namespace {

constexpr double kHalfPi = 1.5707963267948966;
constexpr double kUMax = 6.0;

// Appends the node at abscissa u >= 0 and, for u > 0, its mirror image.
void push_pair(std::vector<QuadNode>& out, double u, double h) {
  const double s = kHalfPi * std::sinh(u);
  const double e = std::exp(-2.0 * s);  // in (0,1]
  const double w = h * 2.0 * kHalfPi * std::cosh(u) * e / ((1.0 + e) * (1.0 + e));
  const double hi_t = 1.0 / (1.0 + e);
  const double lo_t = e / (1.0 + e);
  const double log1pe = std::log1p(e);
  if (u == 0.0) {
    out.push_back({0.5, 0.5, -std::log(2.0), w});
    return;
  }
  out.push_back({hi_t, lo_t, -log1pe, w});
  out.push_back({lo_t, hi_t, -2.0 * s - log1pe, w});
}

}  // namespace

TanhSinh::TanhSinh() : levels_(kMaxLevel + 1) {
  for (int j = 0; j <= static_cast<int>(kUMax); ++j) push_pair(levels_[0], j, 1.0);
  for (int l = 1; l <= kMaxLevel; ++l) {
    const double h = std::ldexp(1.0, -l);
    auto& nodes = levels_[static_cast<std::size_t>(l)];
    for (long j = 1; j * h <= kUMax; j += 2) push_pair(nodes, static_cast<double>(j) * h, h);
  }
}

const TanhSinh& TanhSinh::instance() {
  static const TanhSinh rule;
  return rule;
}

}  // namespace kb
