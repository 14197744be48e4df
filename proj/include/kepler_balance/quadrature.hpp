#pragma once

// Tanh-sinh quadrature on (0,1). Nodes carry t, 1-t and log t computed without cancellation so
// that integrands with endpoint singularities t^{-a} or log factors can be evaluated safely.

#include <vector>

namespace kb {

struct QuadNode {
  double t;
  double omt;     // 1 - t
  double log_t;   // log t
  double weight;  // includes the step h of the node's level
};

/// Nested tanh-sinh rule. Level l has step 2^{-l}; nodes(l) holds only the nodes first used at
/// level l, so the level-l rule is the union of levels 0..l with weights rescaled by 2^{-l}.
class TanhSinh {
 public:
  static constexpr int kMaxLevel = 12;

  static const TanhSinh& instance();

  const std::vector<QuadNode>& nodes(int level) const { return levels_[static_cast<std::size_t>(level)]; }

  struct Result {
    double value;
    double error;  // difference between the last two levels
    int level;
  };

  /// Integrates g(node) over (0,1), refining until successive levels differ by at most
  /// max(abs_tol, rel_tol*|value|). g receives the node so it can use omt and log_t.
  template <class G>
  Result integrate(G&& g, double abs_tol, double rel_tol = 1e-15, int max_level = kMaxLevel) const;

 private:
  TanhSinh();
  std::vector<std::vector<QuadNode>> levels_;
};

template <class G>
TanhSinh::Result TanhSinh::integrate(G&& g, double abs_tol, double rel_tol, int max_level) const {
  // Sums are kept in units of the level-0 step and rescaled on refinement.
  double raw = 0.0;
  for (const auto& node : levels_[0]) raw += node.weight * g(node);
  double value = raw;
  double error = 0.0;
  int level = 0;
  for (int l = 1; l <= max_level; ++l) {
    double fresh = 0.0;
    for (const auto& node : levels_[static_cast<std::size_t>(l)]) fresh += node.weight * g(node);
    const double next = 0.5 * value + fresh;
    error = next - value;
    error = error < 0 ? -error : error;
    value = next;
    level = l;
    const double mag = value < 0 ? -value : value;
    if (l >= 3 && (error <= abs_tol || error <= rel_tol * mag)) break;
  }
  return {value, error, level};
}

}  // namespace kb
