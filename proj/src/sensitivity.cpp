#include "dmcore/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dmcore/errors.hpp"
#include "dmcore/parallel.hpp"
#include "dmcore/ranges.hpp"
#include "dmcore/rng.hpp"

namespace dmcore {

namespace {

// Nearest center, ties by smallest center id.
int nearest_center(const MetricSpace& M, int x, std::span<const int> centers) {
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (int c : centers) {
    double d = M.distance(x, c);
    if (d < best_d - kDistanceTol ||
        (std::abs(d - best_d) <= kDistanceTol && (best < 0 || c < best))) {
      best = c;
      best_d = d;
    }
  }
  return best;
}

double weighted_cost(const MetricSpace& M, std::span<const int> support,
                     std::span<const double> weights,
                     std::span<const int> centers, double z) {
  double total = 0.0;
  for (std::size_t i = 0; i < support.size(); ++i)
    total += weights[i] * pow_z(M.distance_to_set(support[i], centers), z);
  return total;
}

std::vector<int> one_seeding_run(const MetricSpace& M,
                                 std::span<const int> candidates,
                                 std::span<const int> support,
                                 std::span<const double> support_w, int k,
                                 double z, Rng rng) {
  std::vector<int> centers;
  std::vector<char> is_center(M.n(), 0);
  // first center: by base weight (multiplicity / external weight)
  std::vector<double> w(candidates.size());
  auto base_weight = [&](int id) {
    for (std::size_t i = 0; i < support.size(); ++i)
      if (support[i] == id) return support_w[i];
    return 0.0;
  };
  bool external = !support.empty();
  double total0 = 0.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    w[i] = external ? base_weight(candidates[i])
                    : static_cast<double>(M.multiplicity(candidates[i]));
    total0 += w[i];
  }
  if (total0 <= 0.0) w.assign(candidates.size(), 1.0);
  centers.push_back(candidates[rng.categorical(w)]);
  is_center[centers.back()] = 1;

  while (static_cast<int>(centers.size()) < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      double base = external ? base_weight(candidates[i])
                             : static_cast<double>(M.multiplicity(candidates[i]));
      w[i] = is_center[candidates[i]]
                 ? 0.0
                 : base * pow_z(M.distance_to_set(candidates[i], centers), z);
      total += w[i];
    }
    if (total <= 0.0) {
      // everything is covered at cost zero; fill with unused candidates
      for (std::size_t i = 0; i < candidates.size(); ++i)
        w[i] = is_center[candidates[i]] ? 0.0 : 1.0;
    }
    centers.push_back(candidates[rng.categorical(w)]);
    is_center[centers.back()] = 1;
  }
  return centers;
}

// First-improvement single swaps; accepts a swap when the new cost is at most
// `accept_factor` times the old one. Swap costs are evaluated from cached
// nearest / second-nearest center distances, O(support) per candidate.
void hill_climb(const MetricSpace& M, std::span<const int> candidates,
                std::span<const int> support, std::span<const double> support_w,
                double z, double accept_factor, int max_passes,
                std::vector<int>& centers, double& cost) {
  std::vector<int> base_ids;
  std::vector<double> base_w;
  if (support.empty()) {
    base_ids.resize(M.n());
    base_w.resize(M.n());
    for (int i = 0; i < M.n(); ++i) {
      base_ids[i] = i;
      base_w[i] = static_cast<double>(M.multiplicity(i));
    }
    support = base_ids;
    support_w = base_w;
  }
  std::size_t m = support.size();
  std::vector<double> d1(m), d2(m);
  std::vector<int> c1(m);
  auto refresh = [&] {
    cost = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      d1[i] = d2[i] = std::numeric_limits<double>::infinity();
      c1[i] = -1;
      for (int c : centers) {
        double d = M.distance(support[i], c);
        if (d < d1[i]) {
          d2[i] = d1[i];
          d1[i] = d;
          c1[i] = c;
        } else if (d < d2[i]) {
          d2[i] = d;
        }
      }
      cost += support_w[i] * pow_z(d1[i], z);
    }
  };
  refresh();
  std::vector<char> is_center(M.n(), 0);
  for (int c : centers) is_center[c] = 1;
  for (int pass = 0; pass < max_passes; ++pass) {
    bool improved = false;
    for (std::size_t out = 0; out < centers.size() && !improved; ++out) {
      int old = centers[out];
      for (int cand : candidates) {
        if (is_center[cand]) continue;
        double trial = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          double keep = c1[i] == old ? d2[i] : d1[i];
          double d = std::min(keep, M.distance(support[i], cand));
          trial += support_w[i] * pow_z(d, z);
        }
        if (trial <= accept_factor * cost) {
          is_center[old] = 0;
          is_center[cand] = 1;
          centers[out] = cand;
          refresh();
          improved = true;
          break;
        }
      }
    }
    if (!improved) break;
  }
}

}  // namespace

BicriteriaSolution dz_seed(const MetricSpace& M, int k, double z, int restarts,
                           std::uint64_t seed) {
  if (k < 1 || k > M.n()) throw validation_error("need 1 <= k <= n");
  if (z <= 0.0) throw validation_error("z must be positive");
  restarts = std::max(1, restarts);
  std::vector<int> all(M.n());
  for (int i = 0; i < M.n(); ++i) all[i] = i;
  Rng root(seed);

  std::vector<std::pair<double, std::vector<int>>> results(restarts);
  parallel_for(restarts, [&](std::size_t t) {
    Rng rng = root.derive("dz-seed-restart", t);
    std::vector<int> centers = one_seeding_run(M, all, {}, {}, k, z, rng);
    double cost = 0.0;
    hill_climb(M, all, {}, {}, z, 1.0 - 1.0 / (10.0 * k), 50, centers, cost);
    results[t] = {cost, std::move(centers)};
  });
  std::size_t best = 0;
  for (std::size_t t = 1; t < results.size(); ++t)
    if (results[t].first < results[best].first) best = t;

  BicriteriaSolution B;
  B.centers = std::move(results[best].second);
  std::sort(B.centers.begin(), B.centers.end());
  B.z = z;
  B.restarts_used = restarts;
  B.assignment.resize(M.n());
  B.cluster_sizes.assign(B.centers.size(), 0);
  B.cost = 0.0;
  for (int x = 0; x < M.n(); ++x) {
    int c = nearest_center(M, x, B.centers);
    B.assignment[x] = c;
    std::size_t slot = static_cast<std::size_t>(
        std::lower_bound(B.centers.begin(), B.centers.end(), c) -
        B.centers.begin());
    B.cluster_sizes[slot] += M.multiplicity(x);
    B.cost += static_cast<double>(M.multiplicity(x)) *
              pow_z(M.distance(x, c), z);
  }
  return B;
}

std::vector<int> weighted_dz_seed(const MetricSpace& M,
                                  std::span<const int> candidates,
                                  std::span<const int> support_ids,
                                  std::span<const double> support_weights,
                                  int k, double z, int restarts,
                                  std::uint64_t seed) {
  if (k < 1 || k > static_cast<int>(candidates.size()))
    throw validation_error("need 1 <= k <= |candidates|");
  restarts = std::max(1, restarts);
  Rng root(seed);
  double best_cost = std::numeric_limits<double>::infinity();
  std::vector<int> best;
  for (int t = 0; t < restarts; ++t) {
    Rng rng = root.derive("dz-seed-restart", static_cast<std::uint64_t>(t));
    std::vector<int> centers = one_seeding_run(M, candidates, support_ids,
                                               support_weights, k, z, rng);
    double cost = 0.0;
    hill_climb(M, candidates, support_ids, support_weights, z,
               1.0 - 1.0 / (10.0 * k), 50, centers, cost);
    if (cost < best_cost) {
      best_cost = cost;
      best = std::move(centers);
    }
  }
  std::sort(best.begin(), best.end());
  return best;
}

double default_c_assumed(double z) {
  double e = std::ceil(2.0 * z * std::log2(z + 1.0)) + 4.0;
  return std::ldexp(1.0, static_cast<int>(e));
}

SensitivityProfile sensitivity_bounds(const MetricSpace& M,
                                      const BicriteriaSolution& B, double z,
                                      double c_assumed, int escalation) {
  if (c_assumed < 1.0) throw validation_error("c_assumed must be >= 1");
  int n = M.n();
  double n_total = static_cast<double>(M.total_weight());
  SensitivityProfile P;
  P.c_assumed = c_assumed;
  P.escalation = escalation;
  P.pi.resize(n);
  P.theta.resize(n);

  if (B.cost <= 0.0 || n == 1) {
    // all candidate centers at cost zero; any weighting works
    for (int x = 0; x < n; ++x) {
      P.pi[x] = 1.0 / n_total;
      P.theta[x] = 1.0;
    }
    P.multiplier = 1.0;
  } else {
    P.multiplier = std::ldexp(1.0, escalation) * std::pow(2.0, 2.0 * z + 2.0) *
                   c_assumed;
    // per-cluster restricted cost and size
    std::vector<double> cluster_cost(B.centers.size(), 0.0);
    std::vector<double> cluster_size(B.centers.size(), 0.0);
    auto slot_of = [&](int center) {
      return static_cast<std::size_t>(
          std::lower_bound(B.centers.begin(), B.centers.end(), center) -
          B.centers.begin());
    };
    for (int x = 0; x < n; ++x) {
      std::size_t s = slot_of(B.assignment[x]);
      double m = static_cast<double>(M.multiplicity(x));
      cluster_cost[s] += m * pow_z(M.distance(x, B.assignment[x]), z);
      cluster_size[s] += m;
    }
    for (int x = 0; x < n; ++x) {
      std::size_t s = slot_of(B.assignment[x]);
      double own = pow_z(M.distance(x, B.assignment[x]), z);
      P.pi[x] = P.multiplier *
                (own / B.cost + cluster_cost[s] / (cluster_size[s] * B.cost) +
                 1.0 / cluster_size[s]);
      int e = 0;
      std::frexp(n_total * P.pi[x], &e);  // 2^(e-1) <= n*pi < 2^e
      P.theta[x] = std::ldexp(1.0, e);
    }
  }
  P.total_pi = 0.0;
  P.total_theta = 0.0;
  for (int x = 0; x < n; ++x) {
    double m = static_cast<double>(M.multiplicity(x));
    P.total_pi += m * P.pi[x];
    P.total_theta += m * P.theta[x];
  }
  return P;
}

std::vector<double> brute_sensitivity(const MetricSpace& M, int k, double z) {
  int n = M.n();
  if (binomial_capped(n, k, 100'000ULL) > 100'000ULL)
    throw guard_error("sensitivity oracle guard exceeded: C(n,k) > 1e5");
  std::vector<double> sigma(n, 0.0);
  std::vector<double> cost(n);
  for_each_combination(n, k, [&](std::span<const int> C) {
    double total = 0.0;
    for (int x = 0; x < n; ++x) {
      cost[x] = pow_z(M.distance_to_set(x, C), z);
      total += static_cast<double>(M.multiplicity(x)) * cost[x];
    }
    if (total <= 0.0) return;  // 0/0 counts as 0
    for (int x = 0; x < n; ++x)
      sigma[x] = std::max(sigma[x], cost[x] / total);
  });
  return sigma;
}

}  // namespace dmcore
