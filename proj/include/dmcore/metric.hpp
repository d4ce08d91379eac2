#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace dmcore {

// Absolute comparison tolerance once the metric is rescaled to min distance 1.
inline constexpr double kDistanceTol = 1e-9;

// d^z for d >= 0 with fast paths for the common exponents.
inline double pow_z(double d, double z) {
  if (z == 1.0) return d;
  if (z == 2.0) return d * d;
  if (d == 0.0) return 0.0;
  return std::pow(d, z);
}

// A finite metric over point ids 0..n-1, backed either by coordinate rows
// (Euclidean) or by an explicit symmetric distance matrix. Coincident input
// points are merged at load and carry a multiplicity; all cost sums are
// multiplicity weighted. Distances are rescaled so the minimum positive
// distance is 1 (scale_factor records the applied factor).
class MetricSpace {
 public:
  static MetricSpace from_coordinates(std::vector<std::vector<double>> rows,
                                      bool rescale = true);
  // flat is row-major n*n. Validates symmetry, zero diagonal, nonnegativity
  // and the triangle inequality (exhaustive for n <= 200, 1e4 random triples
  // otherwise).
  static MetricSpace from_distance_matrix(std::vector<double> flat, int n,
                                          bool rescale = true,
                                          bool validate = true);

  int n() const { return n_; }
  std::int64_t multiplicity(int i) const { return multiplicity_[i]; }
  std::int64_t total_weight() const { return total_weight_; }
  double scale_factor() const { return scale_factor_; }
  bool has_coordinates() const { return !coords_.empty(); }
  int dim() const { return dim_; }
  std::span<const double> coordinates(int i) const {
    return {coords_.data() + static_cast<std::size_t>(i) * dim_,
            static_cast<std::size_t>(dim_)};
  }

  double distance(int i, int j) const {
    if (i == j) return 0.0;
    if (!coords_.empty()) {
      const double* a = coords_.data() + static_cast<std::size_t>(i) * dim_;
      const double* b = coords_.data() + static_cast<std::size_t>(j) * dim_;
      double s = 0.0;
      for (int t = 0; t < dim_; ++t) {
        double d = a[t] - b[t];
        s += d * d;
      }
      return std::sqrt(s);
    }
    return matrix_[static_cast<std::size_t>(i) * n_ + j];
  }

  double diameter() const;
  // Minimum distance from i to any id in C.
  double distance_to_set(int i, std::span<const int> C) const;

 private:
  MetricSpace() = default;
  void finalize(bool rescale);

  int n_ = 0;
  int dim_ = 0;
  std::vector<double> coords_;   // n*dim when coordinate-backed
  std::vector<double> matrix_;   // n*n when matrix-backed
  std::vector<std::int64_t> multiplicity_;
  std::int64_t total_weight_ = 0;
  double scale_factor_ = 1.0;
  mutable double diameter_ = -1.0;
};

// k distinct point ids.
class CenterSet {
 public:
  CenterSet(std::vector<int> ids, const MetricSpace& M);
  const std::vector<int>& ids() const { return ids_; }
  int k() const { return static_cast<int>(ids_.size()); }

 private:
  std::vector<int> ids_;
};

struct CostQuery {
  double z = 1.0;      // power exponent, > 0
  double gamma = 0.0;  // trim fraction in [0, 1)
};

// Sum over points of multiplicity * d(x, C)^z.
double kdist(const MetricSpace& M, const CenterSet& C, double z);

// Sorts d(x,C)^z ascending (stable by (value, id), expanding multiplicities)
// and sums the smallest ceil((1-gamma) * n) values.
double kdist_trimmed(const MetricSpace& M, const CenterSet& C,
                     const CostQuery& q);

// Trimmed cost of an explicit multiset of point ids (used for uniform
// samples, where the same id may repeat).
double kdist_trimmed_multiset(const MetricSpace& M, std::span<const int> ids,
                              const CenterSet& C, const CostQuery& q);

// Number of values kept by a gamma-trim of m items.
std::int64_t trim_keep_count(std::int64_t m, double gamma);

// The two-sided line construction whose raw distance function shatters
// 2^n subsets while its doubling dimension stays <= 2: n points on one line,
// 2^n on another, cross distances 2^(n+1) or 2^(n+1)+1 by binary digit.
// Line point u_i has id i-1; v_j has id n+j.
MetricSpace hard_instance(int n);

// Upper estimate of the doubling dimension: max over (center, power-of-two
// radius) of log2 of a greedy half-radius cover size. Balls that need at most
// two covering balls contribute 0 (they carry no signal). This is an upper
// estimate used for sizing formulas and diagnostics only.
double estimate_doubling_dim(const MetricSpace& M);

}  // namespace dmcore
