#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dmcore/sensitivity.hpp"

namespace dmcore {

struct CoresetParams {
  int k = 1;
  double z = 1.0;
  double eps = 0.005;
  double tau = 0.005;
  std::uint64_t seed = 0;
  std::optional<std::int64_t> size_override;
  double A = 1.0;  // multiplier absorbing the hidden size constants
  int restarts = 5;
  std::optional<double> ddim_override;
  std::optional<double> c_assumed;
};

struct WeightedCoreset {
  struct Entry {
    int id;
    double weight;
    int draw;
  };
  std::vector<Entry> entries;
  CoresetParams params;
  std::int64_t gamma = 0;  // sample count actually drawn
  double ddim_used = 0.0;
  SensitivityProfile profile;
};

// Sample count: min(n, ceil(A * (k^3/eps^2) * (ddim*log(z/eps) + log k +
// log log(1/tau)) + A * (k^2/eps^2) * log(1/tau))), natural logs, each term
// clamped at zero.
std::int64_t coreset_size_formula(std::int64_t n, int k, double z, double eps,
                                  double tau, double ddim, double A);

// Importance sampling proportional to the rounded sensitivities theta. Each
// of the gamma i.i.d. draws is kept as its own weighted entry with weight
// total_theta / (gamma * theta_x). Runs on the original metric; the smoothed
// distance never enters the build. Requires 0 < eps, tau < 1/100.
WeightedCoreset build_coreset(const MetricSpace& M, const CoresetParams& p);

struct EvalRow {
  std::vector<int> centers;
  double true_cost;
  double coreset_cost;
  double rel_error;
};

struct EvalReport {
  std::vector<EvalRow> rows;
  double max_error = 0.0;
  double mean_error = 0.0;
  double frac_exceeding = 0.0;  // fraction of rows with rel_error > eps
};

// Relative cost error of arbitrary weighted entries over the given center
// sets (0/0 reads as 0).
EvalReport evaluate_coreset(const MetricSpace& M,
                            const std::vector<WeightedCoreset::Entry>& entries,
                            const std::vector<std::vector<int>>& center_sets,
                            double z, double eps);

std::string coreset_to_json(const WeightedCoreset& W);
// Parses {meta:{...}, entries:[{id,weight}]}; draws are re-numbered 0..m-1.
WeightedCoreset coreset_from_json(const std::string& text);

}  // namespace dmcore
