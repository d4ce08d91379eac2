#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dmcore/metric.hpp"

namespace dmcore {

struct RobustSample {
  std::vector<int> ids;  // multiset, i.i.d. uniform over input copies
  double alpha = 0.0;
  double eps = 0.0;
  std::uint64_t seed = 0;
};

RobustSample uniform_sample(const MetricSpace& M, std::int64_t size,
                            std::uint64_t seed, double alpha = 0.0,
                            double eps = 0.0);

// Sample count for robust checks and the clusterability test:
// min(n, ceil(A * ((k/alpha^2) * (ddim*log(z/eps) + log k + log log(1/tau))
//              + log(1/tau)/alpha^2))).
std::int64_t robust_size_formula(std::int64_t n, int k, double z, double alpha,
                                 double eps, double tau, double ddim, double A);

struct RobustCheckResult {
  bool pass = true;
  double worst_margin = std::numeric_limits<double>::infinity();
  double worst_gamma = 0.0;
  std::vector<int> worst_centers;
  std::int64_t checks = 0;
};

// Verifies, for every center set and every gamma in the grid, that the
// gamma-trimmed mean cost of the sample brackets the (gamma +- alpha)-trimmed
// mean cost of the full set within (1 +- eps). Margin < 1 means a violation.
RobustCheckResult robust_check(const MetricSpace& M, std::span<const int> sample,
                               double alpha, double eps, double z, int k,
                               std::span<const double> gammas,
                               const std::vector<std::vector<int>>& center_sets);

// Default gamma grid: 9 evenly spaced values inside (alpha, 1-alpha).
std::vector<double> default_gamma_grid(double alpha);

// All gammas in (alpha, 1-alpha) where any of the trim counts
// ceil((1-g)s), ceil((1-g-a)n), ceil((1-g+a)n) can change, padded with region
// midpoints; trimmed costs are constant between consecutive entries, so
// checking the grid checks every gamma.
std::vector<double> gamma_breakpoint_grid(std::int64_t n, std::int64_t s,
                                          double alpha);

// All k-subsets of the point ids. Guard: C(n,k) <= 1e5.
std::vector<std::vector<int>> enumerate_center_sets(const MetricSpace& M, int k);
std::vector<std::vector<int>> sample_center_sets(const MetricSpace& M, int k,
                                                 int count, std::uint64_t seed);

enum class OutlierMode { kExhaustive, kHeuristic };

// Best gamma-trimmed (k,z) cost over candidate centers. Exhaustive mode
// searches every k-subset of the candidate ids (guard C(m,k) <= 1e5) and is
// optimal; the heuristic alternates power-of-z seeding on the trimmed working
// set with re-trimming for 10 rounds. `subset` restricts both the candidate
// centers and the cost multiset (empty = whole space).
double bicriteria_outliers(const MetricSpace& M, std::span<const int> subset,
                           int k, double z, double gamma, OutlierMode mode,
                           std::uint64_t seed = 0);

struct PropertyTestParams {
  int k = 1;
  double z = 1.0;
  double Delta = 0.0;
  double gamma = 0.25;
  double alpha = 0.1;
  double eps = 0.1;
  double tau = 0.05;
  double lambda = 1.0;
  std::uint64_t seed = 0;
  double A = 1.0;
  std::optional<std::int64_t> size_override;
  OutlierMode inner = OutlierMode::kExhaustive;
};

struct TestVerdict {
  bool accept = false;
  double Lambda = 0.0;
  double threshold = 0.0;
  std::int64_t sample_size = 0;
  PropertyTestParams params;
};

// Clusterability tester: draws a uniform sample, solves the outlier problem
// on it, and accepts iff the value is at most (1+eps/4)*lambda*(|S|/|X|)*Delta.
TestVerdict property_test(const MetricSpace& M, const PropertyTestParams& p);

}  // namespace dmcore
