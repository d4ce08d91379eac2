#include "dmcore/robust.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "dmcore/errors.hpp"
#include "dmcore/ranges.hpp"
#include "dmcore/rng.hpp"
#include "dmcore/sensitivity.hpp"

namespace dmcore {

RobustSample uniform_sample(const MetricSpace& M, std::int64_t size,
                            std::uint64_t seed, double alpha, double eps) {
  if (size < 1) throw validation_error("sample size must be >= 1");
  RobustSample S;
  S.alpha = alpha;
  S.eps = eps;
  S.seed = seed;
  Rng rng = Rng(seed).derive("uniform-sample");
  // uniform over input copies == multiplicity-weighted over merged ids
  std::vector<std::int64_t> cum(M.n());
  std::int64_t acc = 0;
  for (int i = 0; i < M.n(); ++i) {
    acc += M.multiplicity(i);
    cum[i] = acc;
  }
  S.ids.reserve(size);
  for (std::int64_t t = 0; t < size; ++t) {
    auto u = static_cast<std::int64_t>(rng.uniform_int(acc)) + 1;
    int id = static_cast<int>(
        std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());
    S.ids.push_back(id);
  }
  return S;
}

std::int64_t robust_size_formula(std::int64_t n, int k, double z, double alpha,
                                 double eps, double tau, double ddim,
                                 double A) {
  auto pos = [](double v) { return std::max(0.0, v); };
  double kk = static_cast<double>(k);
  double a2 = alpha * alpha;
  double main = A * (kk / a2) *
                pos(ddim * pos(std::log(z / eps)) + std::log(kk) +
                    pos(std::log(pos(std::log(1.0 / tau)))));
  double tail = A * pos(std::log(1.0 / tau)) / a2;
  auto size = static_cast<std::int64_t>(std::ceil(main + tail));
  return std::clamp<std::int64_t>(size, 1, n);
}

std::vector<double> default_gamma_grid(double alpha) {
  std::vector<double> g;
  double span = 1.0 - 2.0 * alpha;
  for (int i = 1; i <= 9; ++i) g.push_back(alpha + span * i / 10.0);
  return g;
}

std::vector<double> gamma_breakpoint_grid(std::int64_t n, std::int64_t s,
                                          double alpha) {
  std::set<double> pts;
  auto add = [&](double g) {
    if (g > alpha + 1e-12 && g < 1.0 - alpha - 1e-12) pts.insert(g);
  };
  for (std::int64_t j = 0; j <= s; ++j)
    add(1.0 - static_cast<double>(j) / static_cast<double>(s));
  for (std::int64_t j = 0; j <= n; ++j) {
    double base = 1.0 - static_cast<double>(j) / static_cast<double>(n);
    add(base - alpha);
    add(base + alpha);
  }
  std::vector<double> grid(pts.begin(), pts.end());
  std::vector<double> out;
  out.push_back(alpha + (grid.empty() ? (1.0 - 2 * alpha) / 2
                                      : (grid.front() - alpha) / 2));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out.push_back(grid[i]);
    double hi = i + 1 < grid.size() ? grid[i + 1] : 1.0 - alpha;
    out.push_back((grid[i] + hi) / 2.0);
  }
  std::erase_if(out, [&](double g) {
    return g <= alpha || g >= 1.0 - alpha;
  });
  return out;
}

std::vector<std::vector<int>> enumerate_center_sets(const MetricSpace& M,
                                                    int k) {
  if (binomial_capped(M.n(), k, 100'000ULL) > 100'000ULL)
    throw guard_error("center enumeration guard exceeded: C(n,k) > 1e5");
  std::vector<std::vector<int>> out;
  for_each_combination(M.n(), k, [&](std::span<const int> C) {
    out.emplace_back(C.begin(), C.end());
  });
  return out;
}

std::vector<std::vector<int>> sample_center_sets(const MetricSpace& M, int k,
                                                 int count,
                                                 std::uint64_t seed) {
  Rng rng = Rng(seed).derive("center-sets");
  std::vector<std::vector<int>> out;
  std::vector<int> ids(M.n());
  for (int i = 0; i < M.n(); ++i) ids[i] = i;
  for (int t = 0; t < count; ++t) {
    // partial Fisher-Yates for a k-subset
    std::vector<int> pool = ids;
    std::vector<int> C;
    for (int j = 0; j < k; ++j) {
      std::size_t pick = j + rng.uniform_int(pool.size() - j);
      std::swap(pool[j], pool[pick]);
      C.push_back(pool[j]);
    }
    std::sort(C.begin(), C.end());
    out.push_back(std::move(C));
  }
  return out;
}

RobustCheckResult robust_check(const MetricSpace& M,
                               std::span<const int> sample, double alpha,
                               double eps, double z, int k,
                               std::span<const double> gammas,
                               const std::vector<std::vector<int>>& center_sets) {
  if (sample.empty()) throw validation_error("empty sample");
  if (gammas.empty()) throw validation_error("empty gamma grid");
  for (double g : gammas)
    if (g <= alpha || g >= 1.0 - alpha)
      throw validation_error("gamma grid must lie inside (alpha, 1-alpha)");

  double n_total = static_cast<double>(M.total_weight());
  double s_total = static_cast<double>(sample.size());
  RobustCheckResult res;
  std::vector<double> full_vals;
  std::vector<double> sample_vals(sample.size());
  for (const auto& ids : center_sets) {
    CenterSet C(ids, M);
    full_vals.clear();
    for (int x = 0; x < M.n(); ++x) {
      double v = pow_z(M.distance_to_set(x, C.ids()), z);
      for (std::int64_t r = 0; r < M.multiplicity(x); ++r)
        full_vals.push_back(v);
    }
    std::sort(full_vals.begin(), full_vals.end());
    for (std::size_t i = 0; i < sample.size(); ++i)
      sample_vals[i] = pow_z(M.distance_to_set(sample[i], C.ids()), z);
    std::sort(sample_vals.begin(), sample_vals.end());
    std::vector<double> full_prefix(full_vals.size() + 1, 0.0);
    for (std::size_t i = 0; i < full_vals.size(); ++i)
      full_prefix[i + 1] = full_prefix[i] + full_vals[i];
    std::vector<double> samp_prefix(sample_vals.size() + 1, 0.0);
    for (std::size_t i = 0; i < sample_vals.size(); ++i)
      samp_prefix[i + 1] = samp_prefix[i] + sample_vals[i];

    for (double g : gammas) {
      double mid = samp_prefix[trim_keep_count(sample.size(), g)] / s_total;
      double low =
          full_prefix[trim_keep_count(M.total_weight(), g + alpha)] / n_total;
      double high =
          full_prefix[trim_keep_count(M.total_weight(), g - alpha)] / n_total;
      double lo_bound = (1.0 - eps) * low;
      double hi_bound = (1.0 + eps) * high;
      double tol = 1e-9 * std::max({1.0, mid, lo_bound, hi_bound});
      bool ok = mid >= lo_bound - tol && mid <= hi_bound + tol;
      double m1 = lo_bound <= 0.0 ? std::numeric_limits<double>::infinity()
                                  : mid / lo_bound;
      double m2 = mid <= 0.0 ? std::numeric_limits<double>::infinity()
                             : hi_bound / mid;
      double margin = std::min(m1, m2);
      ++res.checks;
      if (margin < res.worst_margin) {
        res.worst_margin = margin;
        res.worst_gamma = g;
        res.worst_centers = ids;
      }
      if (!ok) res.pass = false;
    }
  }
  return res;
}

namespace {

double trimmed_cost_of_multiset(const MetricSpace& M,
                                std::span<const int> subset,
                                const CenterSet& C, double z, double gamma) {
  return kdist_trimmed_multiset(M, subset, C, {z, gamma});
}

double exhaustive_outliers(const MetricSpace& M, std::span<const int> subset,
                           int k, double z, double gamma) {
  std::vector<int> cands(subset.begin(), subset.end());
  std::sort(cands.begin(), cands.end());
  cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
  int m = static_cast<int>(cands.size());
  if (k > m) throw validation_error("k exceeds candidate count");
  if (binomial_capped(m, k, 100'000ULL) > 100'000ULL)
    throw guard_error("outlier search guard exceeded: C(m,k) > 1e5");
  double best = std::numeric_limits<double>::infinity();
  for_each_combination(m, k, [&](std::span<const int> comb) {
    std::vector<int> C;
    C.reserve(k);
    for (int i : comb) C.push_back(cands[i]);
    best = std::min(best,
                    trimmed_cost_of_multiset(M, subset, CenterSet(C, M), z, gamma));
  });
  return best;
}

double heuristic_outliers(const MetricSpace& M, std::span<const int> subset,
                          int k, double z, double gamma, std::uint64_t seed) {
  std::vector<int> cands(subset.begin(), subset.end());
  std::sort(cands.begin(), cands.end());
  cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
  if (k > static_cast<int>(cands.size()))
    throw validation_error("k exceeds candidate count");
  Rng root(seed);
  std::vector<int> working(subset.begin(), subset.end());
  double best = std::numeric_limits<double>::infinity();
  for (int round = 0; round < 10; ++round) {
    std::vector<double> unit(working.size(), 1.0);
    std::vector<int> centers = weighted_dz_seed(
        M, cands, working, unit, k, z, 1,
        root.derive("outlier-round", static_cast<std::uint64_t>(round))
            .next_u64());
    CenterSet C(centers, M);
    best = std::min(best, trimmed_cost_of_multiset(M, subset, C, z, gamma));
    // re-trim: keep the copies with the smallest current cost
    std::vector<std::pair<double, int>> scored;
    scored.reserve(subset.size());
    for (int id : subset)
      scored.emplace_back(pow_z(M.distance_to_set(id, C.ids()), z), id);
    std::sort(scored.begin(), scored.end());
    std::int64_t keep = trim_keep_count(scored.size(), gamma);
    working.clear();
    for (std::int64_t i = 0; i < keep; ++i) working.push_back(scored[i].second);
  }
  return best;
}

}  // namespace

double bicriteria_outliers(const MetricSpace& M, std::span<const int> subset,
                           int k, double z, double gamma, OutlierMode mode,
                           std::uint64_t seed) {
  if (gamma < 0.0 || gamma >= 1.0)
    throw validation_error("gamma must lie in [0, 1)");
  std::vector<int> whole;
  if (subset.empty()) {
    for (int x = 0; x < M.n(); ++x)
      for (std::int64_t r = 0; r < M.multiplicity(x); ++r) whole.push_back(x);
    subset = whole;
  }
  return mode == OutlierMode::kExhaustive
             ? exhaustive_outliers(M, subset, k, z, gamma)
             : heuristic_outliers(M, subset, k, z, gamma, seed);
}

TestVerdict property_test(const MetricSpace& M, const PropertyTestParams& p) {
  if (p.alpha <= 0.0 || p.alpha >= 0.25)
    throw validation_error("alpha must lie in (0, 1/4)");
  if (p.gamma <= p.alpha || p.gamma >= 1.0 - p.alpha)
    throw validation_error("gamma must lie in (alpha, 1-alpha)");
  if (p.eps <= 0.0 || p.eps >= 0.25)
    throw validation_error("eps must lie in (0, 1/4)");
  if (p.tau <= 0.0 || p.tau >= 1.0)
    throw validation_error("tau must lie in (0, 1)");
  if (p.lambda < 1.0) throw validation_error("lambda must be >= 1");
  if (p.Delta < 0.0) throw validation_error("Delta must be >= 0");
  if (p.k < 1 || p.k > M.n()) throw validation_error("need 1 <= k <= n");

  TestVerdict v;
  v.params = p;
  double ddim = estimate_doubling_dim(M);
  v.sample_size = p.size_override.value_or(robust_size_formula(
      M.total_weight(), p.k, p.z, p.alpha / 2.0, p.eps, p.tau, ddim, p.A));
  RobustSample S = uniform_sample(M, v.sample_size,
                                  Rng(p.seed).derive("pt-sample").next_u64(),
                                  p.alpha, p.eps);
  v.Lambda = bicriteria_outliers(M, S.ids, p.k, p.z, p.gamma, p.inner,
                                 Rng(p.seed).derive("pt-solver").next_u64());
  v.threshold = (1.0 + p.eps / 4.0) * p.lambda *
                (static_cast<double>(v.sample_size) /
                 static_cast<double>(M.total_weight())) *
                p.Delta;
  double tol = 1e-9 * std::max(1.0, v.threshold);
  v.accept = v.Lambda <= v.threshold + tol;
  return v;
}

}  // namespace dmcore
