#include "dmcore/centroid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "dmcore/errors.hpp"
#include "dmcore/ranges.hpp"
#include "dmcore/sensitivity.hpp"

namespace dmcore {

namespace {

// Signature of the S-partition at a level: each member mapped to the smallest
// id in its block.
std::vector<int> partition_signature(std::span<const int> S, const NetTree& T,
                                     int level) {
  std::unordered_map<int, int> block_min;
  for (int s : S) {
    int a = T.parent_at(s, level);
    auto it = block_min.find(a);
    if (it == block_min.end())
      block_min.emplace(a, s);
    else
      it->second = std::min(it->second, s);
  }
  std::vector<int> sig;
  sig.reserve(S.size());
  for (int s : S) sig.push_back(block_min.at(T.parent_at(s, level)));
  return sig;
}

}  // namespace

InvariantIntervals invariant_intervals(std::span<const int> S,
                                       const NetTree& T) {
  if (S.empty()) throw validation_error("S must be nonempty");
  if (T.flavor() != TreeFlavor::kSimple)
    throw validation_error("invariant intervals require a simple net tree");
  int L = T.top_level();
  InvariantIntervals out;
  int start = 0;
  std::vector<int> cur = partition_signature(S, T, 0);
  for (int i = 0; i < L; ++i) {
    std::vector<int> next = partition_signature(S, T, i + 1);
    if (next != cur) {
      out.intervals.emplace_back(start, i + 1);
      start = i + 1;
      cur = std::move(next);
    }
  }
  out.intervals.emplace_back(start, L + 1);
  return out;
}

CentroidSet build_centroid_set(const MetricSpace& M, const NetTree& T,
                               std::span<const int> S,
                               std::span<const double> w, double eps, int k,
                               double z, std::optional<double> ddim_hint) {
  if (eps <= 0.0 || eps >= 1.0 / z)
    throw validation_error("eps must lie in (0, 1/z)");
  if (S.empty()) throw validation_error("S must be nonempty");
  if (w.size() != S.size())
    throw validation_error("weights must parallel S");

  CentroidSet H;
  H.source_ids.assign(S.begin(), S.end());
  H.source_weights.assign(w.begin(), w.end());
  H.eps = eps;
  H.k = k;
  H.z = z;

  std::set<int> ids(S.begin(), S.end());
  InvariantIntervals intervals = invariant_intervals(S, T);
  int log_eps_margin = static_cast<int>(std::ceil(std::log2(1.0 / eps)));

  const auto& hierarchy = T.hierarchy();
  for (auto [a, b] : intervals.intervals) {
    std::set<int> level_window;
    for (int j = a; j <= std::min(a + 3, b - 1); ++j) level_window.insert(j);
    for (int j = std::max(a, b - 6 - log_eps_margin); j <= b - 1; ++j)
      level_window.insert(j);
    for (int j : level_window) {
      // net points whose subtree meets S
      std::set<int> hit;
      for (int s : S) hit.insert(T.parent_at(s, j));
      int jp = static_cast<int>(
          std::floor(std::log2(eps * std::ldexp(1.0, j))));
      double radius = 5.0 * std::ldexp(1.0, j);
      for (int u : hit) {
        if (jp <= 0) {
          for (int x = 0; x < M.n(); ++x)
            if (M.distance(u, x) <= radius + kDistanceTol) ids.insert(x);
        } else if (jp <= hierarchy.L) {
          for (int x : hierarchy.levels[jp])
            if (M.distance(u, x) <= radius + kDistanceTol) ids.insert(x);
        } else {
          ids.insert(hierarchy.levels[hierarchy.L][0]);
        }
      }
    }
  }
  H.ids.assign(ids.begin(), ids.end());

  double ddim = ddim_hint.value_or(estimate_doubling_dim(M));
  double cap_exp = std::max(1.0, std::ceil(ddim));
  H.size_cap = std::pow(128.0 / eps, cap_exp) *
               static_cast<double>(S.size()) * static_cast<double>(S.size());
  return H;
}

namespace {

double weighted_objective(const MetricSpace& M, std::span<const int> support,
                          std::span<const double> weights,
                          std::span<const int> centers, double z) {
  double total = 0.0;
  for (std::size_t i = 0; i < support.size(); ++i)
    total += weights[i] * pow_z(M.distance_to_set(support[i], centers), z);
  return total;
}

}  // namespace

std::pair<std::vector<int>, SearchTrace> local_search(
    const MetricSpace& M, std::span<const int> H,
    std::span<const int> support_ids, std::span<const double> support_weights,
    int k, double z, int rho, double improve_factor, std::uint64_t seed,
    int restarts) {
  if (rho < 1 || rho > k) throw validation_error("need 1 <= rho <= k");
  if (k > static_cast<int>(H.size()))
    throw validation_error("k exceeds candidate count");
  if (support_ids.size() != support_weights.size())
    throw validation_error("support weights must parallel support ids");

  std::vector<int> cands(H.begin(), H.end());
  std::sort(cands.begin(), cands.end());
  cands.erase(std::unique(cands.begin(), cands.end()), cands.end());

  std::vector<int> centers =
      weighted_dz_seed(M, cands, support_ids, support_weights, k, z, restarts,
                       seed);
  SearchTrace trace;
  double cost = weighted_objective(M, support_ids, support_weights, centers, z);
  trace.initial_cost = cost;

  std::vector<int> pool;  // candidates not currently centers
  int iteration = 0;
  for (;;) {
    std::sort(centers.begin(), centers.end());
    pool.clear();
    std::set_difference(cands.begin(), cands.end(), centers.begin(),
                        centers.end(), std::back_inserter(pool));
    bool improved = false;
    for (int q = 1; q <= rho && !improved; ++q) {
      if (q > static_cast<int>(pool.size())) break;
      for_each_combination(k, q, [&](std::span<const int> out_slots) {
        if (improved) return;
        std::vector<int> out_ids;
        for (int s : out_slots) out_ids.push_back(centers[s]);
        for_each_combination(static_cast<int>(pool.size()), q,
                             [&](std::span<const int> in_slots) {
          if (improved) return;
          std::vector<int> trial = centers;
          for (int t = 0; t < q; ++t) {
            auto it = std::find(trial.begin(), trial.end(), out_ids[t]);
            *it = pool[in_slots[t]];
          }
          double trial_cost = weighted_objective(M, support_ids,
                                                 support_weights, trial, z);
          if (trial_cost < improve_factor * cost) {
            std::vector<int> in_ids;
            for (int s : in_slots) in_ids.push_back(pool[s]);
            ++iteration;
            trace.steps.push_back({iteration, trial_cost, out_ids, in_ids});
            centers = std::move(trial);
            cost = trial_cost;
            improved = true;
          }
        });
      });
    }
    if (!improved) break;
  }
  std::sort(centers.begin(), centers.end());
  trace.final_cost = cost;
  return {centers, trace};
}

}  // namespace dmcore
