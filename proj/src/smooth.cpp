#include "dmcore/smooth.hpp"

#include <cmath>

#include "dmcore/errors.hpp"

namespace dmcore {

SmoothedMetric::SmoothedMetric(const NetTree& tree, double eps, double z)
    : tree_(&tree), eps_(eps), z_(z) {
  if (z <= 0.0) throw validation_error("z must be positive");
  double c = tree.c_cover();
  double cap = z == 1.0 ? 1.0 / (8.0 * c) : 1.0 / (100.0 * z);
  if (eps <= 0.0 || eps > cap + 1e-15)
    throw validation_error("eps outside (0, " + std::to_string(cap) +
                           "] for this tree and exponent");
  lambda_ = eps * (1.0 - 5.0 * c * eps) / (20.0 * (1.0 + 4.0 * c * eps));
  level_floor_ = static_cast<int>(std::floor(std::log2(eps)));
}

int SmoothedMetric::smoothing_level(int x, int y) const {
  if (x == y) return kLevelNegInf;
  const MetricSpace& M = tree_->metric();
  for (int j = tree_->top_level(); j >= level_floor_; --j) {
    int u = tree_->parent_at(x, j);
    int v = tree_->parent_at(y, j);
    if (u == v) continue;
    if (M.distance(u, v) >= std::ldexp(1.0, j) / eps_ - kDistanceTol) return j;
  }
  throw internal_error("no smoothing level found for distinct points");
}

double SmoothedMetric::delta(int x, int y) const {
  if (x == y) return 0.0;
  int j = smoothing_level(x, y);
  return tree_->metric().distance(tree_->parent_at(x, j),
                                  tree_->parent_at(y, j));
}

std::vector<double> SmoothedMetric::delta_row(int x) const {
  int n = tree_->metric().n();
  std::vector<double> row(n);
  for (int y = 0; y < n; ++y) row[y] = delta(x, y);
  return row;
}

std::vector<int> SmoothedMetric::ball(int x, double r) const {
  std::vector<int> out;
  if (r < 0.0) return out;
  int n = tree_->metric().n();
  for (int y = 0; y < n; ++y)
    if (delta(x, y) <= r) out.push_back(y);
  return out;
}

int SmoothedMetric::ball_level(double r) const {
  if (r <= 0.0) throw validation_error("radius must be positive");
  int j = static_cast<int>(std::floor(std::log2(lambda_ * r))) + 1;
  return std::min(j, tree_->top_level());
}

}  // namespace dmcore
