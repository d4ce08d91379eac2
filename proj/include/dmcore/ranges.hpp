#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "dmcore/smooth.hpp"

namespace dmcore {

enum class Kernel { kPlainD, kSmoothedDelta };

// Weighted distance-function family indexed by a subset H of the point set:
// f_x(y) = w(x) * kern(x, y)^z, extended to k-subsets by the min over the
// subset. Ranges are the sublevel sets {x in H : f_x(C) <= r}.
struct FunctionFamily {
  std::vector<int> index_set;    // H, ascending ids
  std::vector<double> weights;   // parallel to index_set
  Kernel kernel = Kernel::kPlainD;
  double z = 1.0;
  const MetricSpace* metric = nullptr;
  const SmoothedMetric* smoothed = nullptr;  // required for kSmoothedDelta

  static FunctionFamily plain(const MetricSpace& M, std::vector<int> H,
                              std::vector<double> w, double z);
  static FunctionFamily over_smoothed(const SmoothedMetric& S,
                                      std::vector<int> H,
                                      std::vector<double> w);

  double kernel_value(int x, int y) const;
  double value(std::size_t index_pos, int center) const;
  double value_at_set(std::size_t index_pos, std::span<const int> C) const;

  // Every pair of distinct weights differs by a factor >= c.
  bool is_gap_weighted(double c) const;
};

struct RangeReport {
  std::uint64_t distinct_count = 0;
  double dim_estimate = 0.0;  // log(count) / log(|H|)
  // canonical sorted-id ranges, kept only when requested (small instances)
  std::optional<std::vector<std::vector<int>>> ranges;
};

// All distinct ranges over singleton centers (the whole point set) and all
// radii. The empty range is always counted. Guard: |X| * |H| <= 1e7.
RangeReport enumerate_ranges_singleton(const FunctionFamily& F,
                                       bool keep_ranges = false);

// Same over k-subset centers. Guard: C(n, k) <= 1e6.
RangeReport enumerate_ranges_ksubset(const FunctionFamily& F, int k,
                                     bool keep_ranges = false);

// Max over all ranges of | |R| / |H|  -  |sample cap R| / |sample| | with the
// sample a multiset of H indices. ground_k = 1 uses singleton centers.
double alpha_deviation(const FunctionFamily& F, std::span<const int> sample,
                       int ground_k = 1);

struct BallDecomposition {
  int level = 0;
  std::vector<int> roots;  // net points at `level` whose subtrees tile the ball
};

// Writes ball(x, r) under delta as a disjoint union of whole level-j subtrees
// (j chosen from lambda * r). Throws internal_error if the subtrees do not
// reconstruct the ball exactly.
BallDecomposition decompose_ball_subtrees(const SmoothedMetric& S, int x,
                                          double r);

// C(n, k) capped at `cap` (returns cap + 1 when it overflows the cap).
std::uint64_t binomial_capped(int n, int k, std::uint64_t cap);

// All k-subsets of {0..n-1}; fn receives each combination. Deterministic
// lexicographic order.
void for_each_combination(int n, int k,
                          const std::function<void(std::span<const int>)>& fn);

}  // namespace dmcore
