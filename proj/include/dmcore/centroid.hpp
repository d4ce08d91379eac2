#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dmcore/net.hpp"

namespace dmcore {

// Maximal level runs [a, b) of {0..L} within which the subtree partition of S
// is unchanged: Des(Par_i(u)) cap S == Des(Par_{i+1}(u)) cap S for every
// u in S and every i in the run's interior. At most |S| + 1 intervals.
struct InvariantIntervals {
  std::vector<std::pair<int, int>> intervals;  // half-open, covering 0..L
};

// Requires a simple-flavor tree and nonempty S.
InvariantIntervals invariant_intervals(std::span<const int> S,
                                       const NetTree& T);

struct CentroidSet {
  std::vector<int> ids;  // H, ascending; always a superset of S
  std::vector<int> source_ids;
  std::vector<double> source_weights;
  double eps = 0.0;
  int k = 1;
  double z = 1.0;
  double size_cap = 0.0;  // configured bound (c_net/eps)^ddim_cap * |S|^2
};

// Candidate-center superset: seed with S, then for level windows at both ends
// of every invariant interval add the net points at scale eps*2^j inside
// radius 5*2^j around every net point whose subtree meets S.
// Requires 0 < eps < 1/z and a simple tree.
CentroidSet build_centroid_set(const MetricSpace& M, const NetTree& T,
                               std::span<const int> S,
                               std::span<const double> w, double eps, int k,
                               double z,
                               std::optional<double> ddim_hint = std::nullopt);

struct SearchTrace {
  struct Step {
    int iteration;
    double cost;
    std::vector<int> swapped_out;
    std::vector<int> swapped_in;
  };
  std::vector<Step> steps;
  double initial_cost = 0.0;
  double final_cost = 0.0;
};

// rho-swap local search over candidate centers H for the weighted objective
// sum w(x) d^z(x, C). Starts from power-of-z seeding restricted to H, then
// applies the first swap (of at most rho centers, candidate order fixed by
// ids) whose cost is < improve_factor * current. Trace costs strictly
// decrease.
std::pair<std::vector<int>, SearchTrace> local_search(
    const MetricSpace& M, std::span<const int> H,
    std::span<const int> support_ids, std::span<const double> support_weights,
    int k, double z, int rho, double improve_factor, std::uint64_t seed,
    int restarts = 3);

}  // namespace dmcore
