#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dmcore/metric.hpp"

namespace dmcore {

// Output of the bicriteria seeding step.
struct BicriteriaSolution {
  std::vector<int> centers;
  double cost = 0.0;                      // kdist(X, centers, z)
  std::vector<int> assignment;            // point -> nearest center id
  std::vector<std::int64_t> cluster_sizes;  // parallel to centers, multiplicity-weighted
  int restarts_used = 0;
  double z = 1.0;
};

// Power-of-z seeding (first center multiplicity-uniform, then proportional to
// d(x, centers)^z), best of `restarts`, then single-swap hill climbing until
// no swap improves the cost by factor 1 - 1/(10k) or 50 passes elapse.
BicriteriaSolution dz_seed(const MetricSpace& M, int k, double z, int restarts,
                           std::uint64_t seed);

// Same seeding restricted to `candidates` with external nonnegative point
// weights on the objective (used by the local search start).
std::vector<int> weighted_dz_seed(const MetricSpace& M,
                                  std::span<const int> candidates,
                                  std::span<const int> support_ids,
                                  std::span<const double> support_weights,
                                  int k, double z, int restarts,
                                  std::uint64_t seed);

struct SensitivityProfile {
  std::vector<double> pi;     // per-point upper bound on twice the sensitivity
  std::vector<double> theta;  // power-of-two rounding of n * pi
  double total_pi = 0.0;      // multiplicity-weighted sums
  double total_theta = 0.0;
  double c_assumed = 1.0;
  double multiplier = 1.0;  // 2^(2z+2) * c_assumed * escalation
  int escalation = 0;
};

// Default assumed bicriteria ratio: 2^(ceil(2 z log2(z+1)) + 4).
double default_c_assumed(double z);

// Three-term per-cluster sensitivity bound:
//   pi_x = 2^(2z+2) * c * ( d^z(x,B)/cost + cost(P)/( |P| cost ) + 1/|P| ),
// which sums (multiplicity-weighted) to exactly 2^(2z+2) * c * (k + 2).
// `escalation` doubles the multiplier (used if an oracle check ever fails).
// When the seeding cost is zero every point gets pi = 1/n and theta = 1.
SensitivityProfile sensitivity_bounds(const MetricSpace& M,
                                      const BicriteriaSolution& B, double z,
                                      double c_assumed, int escalation = 0);

// Exact sensitivities by enumerating every center set: sigma(x) =
// max_C d^z(x,C) / kdist(X,C,z), 0/0 read as 0. Guard: C(n,k) <= 1e5.
std::vector<double> brute_sensitivity(const MetricSpace& M, int k, double z);

}  // namespace dmcore
