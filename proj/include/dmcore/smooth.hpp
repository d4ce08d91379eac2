#pragma once

#include <limits>
#include <vector>

#include "dmcore/net.hpp"

namespace dmcore {

inline constexpr int kLevelNegInf = std::numeric_limits<int>::min();

// Smoothed distance over a net tree: delta(x, y) is the distance between the
// level-j ancestors of x and y at the largest j where that distance is at
// least 2^j / eps. A (1 +- 4*c*eps) perturbation of d that trades metric
// exactness for heavily structured balls. Not a metric itself (the triangle
// inequality may fail).
class SmoothedMetric {
 public:
  // z = 1 requires eps <= 1/(8c); other exponents require eps <= 1/(100z).
  SmoothedMetric(const NetTree& tree, double eps, double z = 1.0);

  const NetTree& tree() const { return *tree_; }
  const MetricSpace& metric() const { return tree_->metric(); }
  double eps() const { return eps_; }
  double z() const { return z_; }
  double c_cover() const { return tree_->c_cover(); }
  // lambda = eps*(1-5c*eps) / (20*(1+4c*eps)); the level-selection constant
  // for ball structure queries.
  double lambda() const { return lambda_; }
  int level_floor() const { return level_floor_; }

  // Largest integer j with d(Par_j(x), Par_j(y)) >= 2^j / eps, scanning from
  // the root down to floor(log2 eps). kLevelNegInf iff x == y.
  int smoothing_level(int x, int y) const;

  double delta(int x, int y) const;
  double delta_z(int x, int y) const { return pow_z(delta(x, y), z_); }

  // Row of delta values from x (callers reuse it across radii).
  std::vector<double> delta_row(int x) const;

  // {y : delta(x, y) <= r}.
  std::vector<int> ball(int x, double r) const;

  // The level used by ball-structure statements for radius r:
  // min(L, the integer j with 2^(j-1) <= lambda * r < 2^j).
  int ball_level(double r) const;

 private:
  const NetTree* tree_;
  double eps_;
  double z_;
  double lambda_;
  int level_floor_;
};

}  // namespace dmcore
