#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "dmcore/errors.hpp"
#include "dmcore/ranges.hpp"
#include "dmcore/rng.hpp"
#include "support/corpus.hpp"
#include "support/oracles.hpp"
#include "support/smooth_checks.hpp"

using namespace dmcore;
using namespace dmtest;

TEST_CASE("a single function yields exactly the empty and full range") {
  auto M = coords_instance({0, 1, 3});
  auto F = FunctionFamily::plain(M, {1}, {}, 1.0);
  auto rep = enumerate_ranges_singleton(F, /*keep_ranges=*/true);
  CHECK(rep.distinct_count == 2);
  REQUIRE(rep.ranges.has_value());
  CHECK((*rep.ranges)[0].empty());
  CHECK((*rep.ranges)[1] == std::vector<int>{1});
}

TEST_CASE("raw distances on the hard instance shatter the left line") {
  for (int n : {3, 4, 5}) {
    CAPTURE(n);
    auto M = hard_instance(n);
    std::vector<int> H;
    for (int i = 0; i < n; ++i) H.push_back(i);
    auto F = FunctionFamily::plain(M, H, {}, 1.0);
    auto rep = enumerate_ranges_singleton(F);
    CHECK(rep.distinct_count >= (1ULL << n));
  }
}

TEST_CASE("prefix enumeration agrees with the brute-force oracle") {
  auto M = coords_instance({0, 1, 3});
  NetTree T = build_simple_tree(M, build_hierarchy(M));
  SmoothedMetric S(T, 1.0 / 8);
  auto F = FunctionFamily::over_smoothed(S, {0, 1, 2}, {});
  auto rep = enumerate_ranges_singleton(F);
  CHECK(rep.distinct_count == brute_range_count_singleton(F));

  for (const auto& [name, M2] : small_corpus()) {
    CAPTURE(name);
    std::vector<int> H;
    for (int i = 0; i < M2.n(); ++i) H.push_back(i);
    auto F2 = FunctionFamily::plain(M2, H, {}, 1.0);
    CHECK(enumerate_ranges_singleton(F2).distinct_count ==
          brute_range_count_singleton(F2));
  }
}

TEST_CASE("k-subset enumeration: k = 1 equals singleton, oracle agreement, power bound") {
  auto M = line_instance(6);
  std::vector<int> H = {0, 1, 2, 3, 4, 5};
  auto F = FunctionFamily::plain(M, H, {}, 1.0);

  auto single = enumerate_ranges_singleton(F);
  auto k1 = enumerate_ranges_ksubset(F, 1);
  CHECK(single.distinct_count == k1.distinct_count);

  auto k2 = enumerate_ranges_ksubset(F, 2);
  CHECK(k2.distinct_count == brute_range_count_ksubset(F, 2));
  // the k-subset count never exceeds the singleton count to the k-th power
  double bound = std::pow(static_cast<double>(single.distinct_count), 2.0);
  CHECK(static_cast<double>(k2.distinct_count) <= bound);

  for (const auto& [name, M2] : small_corpus()) {
    if (M2.n() > 14) continue;
    CAPTURE(name);
    std::vector<int> H2;
    for (int i = 0; i < M2.n(); ++i) H2.push_back(i);
    auto F2 = FunctionFamily::plain(M2, H2, {}, 2.0);
    auto s = enumerate_ranges_singleton(F2);
    auto k = enumerate_ranges_ksubset(F2, 2);
    CHECK(static_cast<double>(k.distinct_count) <=
          std::pow(static_cast<double>(s.distinct_count), 2.0));
  }
}

TEST_CASE("guards reject oversized enumerations") {
  auto M = random_euclidean(200, 2, 3);
  std::vector<int> H;
  for (int i = 0; i < M.n(); ++i) H.push_back(i);
  auto F = FunctionFamily::plain(M, H, {}, 1.0);
  CHECK_THROWS_AS(enumerate_ranges_ksubset(F, 5), guard_error);
}

TEST_CASE("alpha deviation basics") {
  auto M = line_instance(6);
  std::vector<int> H = {0, 1, 2, 3, 4, 5};
  auto F = FunctionFamily::plain(M, H, {}, 1.0);

  // the full set as a sample has zero deviation
  CHECK(alpha_deviation(F, H) == doctest::Approx(0.0));

  // two coincident-by-value functions are indistinguishable by ranges
  auto U = uniform_metric(4);
  auto FU = FunctionFamily::plain(U, {0, 1}, {}, 1.0);
  std::vector<int> doubled = {0, 0};
  CHECK(alpha_deviation(FU, doubled) <= 0.5);  // only the split at centers 0/1
  std::vector<int> aa = {0, 1};
  CHECK(alpha_deviation(FU, aa) == doctest::Approx(0.0));

  // brute comparison on a 6-point instance with half the indices sampled
  std::vector<int> half = {0, 2, 4};
  double dev = alpha_deviation(F, half);
  double brute = 0.0;
  for (int c = 0; c < M.n(); ++c) {
    std::vector<double> vals;
    for (int x : H) vals.push_back(M.distance(x, c));
    for (double r : vals) {
      double in_r = 0, in_s = 0;
      for (int x : H)
        if (M.distance(x, c) <= r) {
          in_r += 1;
          if (x % 2 == 0) in_s += 1;
        }
      brute = std::max(brute, std::abs(in_r / 6.0 - in_s / 3.0));
    }
  }
  CHECK(dev == doctest::Approx(brute));
}

TEST_CASE("alpha deviation of equal-weight duplicates is zero") {
  // two indices whose functions are identical: every range holds both or none
  auto M = MetricSpace::from_distance_matrix(
      {0, 1, 5, 1, 0, 5, 5, 5, 0}, 3, true, true);
  auto F = FunctionFamily::plain(M, {0, 1}, {1.0, 1.0}, 1.0);
  // indices 0 and 1 are symmetric but not identical functions; sample both
  std::vector<int> s = {0, 1};
  CHECK(alpha_deviation(F, s) == doctest::Approx(0.0));
}

TEST_CASE("ball decomposition into whole subtrees") {
  auto M = coords_instance({0, 1, 3});
  NetTree T = build_simple_tree(M, build_hierarchy(M));
  SmoothedMetric S(T, 1.0 / 8);

  auto big = decompose_ball_subtrees(
      S, 0, (1.0 + 4 * S.eps()) * M.diameter() + 1.0);
  std::vector<int> covered;
  for (int v : big.roots)
    for (int y : T.descendants(v, big.level)) covered.push_back(y);
  std::sort(covered.begin(), covered.end());
  CHECK(covered == std::vector<int>{0, 1, 2});

  auto tiny = decompose_ball_subtrees(S, 0, 0.5);
  covered.clear();
  for (int v : tiny.roots)
    for (int y : T.descendants(v, tiny.level)) covered.push_back(y);
  CHECK(covered == std::vector<int>{0});

  auto unit = decompose_ball_subtrees(S, 0, 1.0);
  covered.clear();
  for (int v : unit.roots)
    for (int y : T.descendants(v, unit.level)) covered.push_back(y);
  std::sort(covered.begin(), covered.end());
  CHECK(covered == std::vector<int>{0, 1});
}

TEST_CASE("decomposition succeeds at every breakpoint radius on simple trees") {
  for (const auto& [name, M] : small_corpus()) {
    if (M.n() < 2) continue;
    CAPTURE(name);
    NetTree T = build_simple_tree(M, build_hierarchy(M));
    SmoothedMetric S(T, 1.0 / 16);
    auto D = delta_matrix(S);
    for (int x = 0; x < M.n(); ++x) {
      std::vector<double> breakpoints;
      for (int y = 0; y < M.n(); ++y) {
        if (D[x][y] > 0) breakpoints.push_back(D[x][y]);
        double d = M.distance(x, y);
        if (d > 0) breakpoints.push_back(d);
      }
      std::sort(breakpoints.begin(), breakpoints.end());
      for (std::size_t i = 0; i < breakpoints.size(); ++i) {
        CHECK_NOTHROW(decompose_ball_subtrees(S, x, breakpoints[i]));
        if (i + 1 < breakpoints.size())
          CHECK_NOTHROW(decompose_ball_subtrees(
              S, x, (breakpoints[i] + breakpoints[i + 1]) / 2.0));
      }
    }
  }
}

TEST_CASE("independent samples meet the deviation bound with the observed range count") {
  // 200 trials; the failure fraction must stay below tau
  auto M = random_euclidean(60, 2, 123);
  std::vector<int> H;
  for (int i = 0; i < M.n(); ++i) H.push_back(i);
  auto F = FunctionFamily::plain(M, H, {}, 1.0);
  double tau = 0.1;
  int m = 600;
  Rng root(4242);
  int fails = 0;
  for (int trial = 0; trial < 200; ++trial) {
    Rng rng = root.derive("trial", trial);
    std::vector<int> doubled;
    for (int i = 0; i < 2 * m; ++i)
      doubled.push_back(H[rng.uniform_int(H.size())]);
    // observed distinct count of the doubled sample's index set
    std::vector<int> uniq = doubled;
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    auto Fd = FunctionFamily::plain(M, uniq, {}, 1.0);
    double T_obs = static_cast<double>(
        enumerate_ranges_singleton(Fd).distinct_count);
    double alpha =
        std::sqrt(48.0 * (std::log(T_obs) + std::log(8.0 / tau)) / m);
    std::vector<int> sample(doubled.begin(), doubled.begin() + m);
    if (alpha_deviation(F, sample) > alpha) ++fails;
  }
  CHECK(static_cast<double>(fails) / 200.0 <= tau);
}

TEST_CASE("gap-2 weighted range counts grow polynomially on decomposition trees") {
  // fitted exponent of count vs |H| stays <= 7 over 50 trials
  Rng root(777);
  std::vector<double> log_m, log_c;
  double worst_count_ratio = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    Rng rng = root.derive("trial", trial);
    auto M = random_euclidean(96, 2, rng.next_u64());
    NetHierarchy H = build_hierarchy(M);
    NetTree T = build_decomposition_tree(M, H, rng.next_u64(), 4.0);
    SmoothedMetric S(T, 1.0 / 128);
    int m = 8 << (trial % 3);  // 8, 16, 32
    std::vector<int> ids(M.n());
    for (int i = 0; i < M.n(); ++i) ids[i] = i;
    rng.shuffle(ids);
    std::vector<int> idx(ids.begin(), ids.begin() + m);
    std::sort(idx.begin(), idx.end());
    std::vector<double> w;
    for (int i = 0; i < m; ++i)
      w.push_back(std::ldexp(1.0, -static_cast<int>(rng.uniform_int(6))));
    auto F = FunctionFamily::over_smoothed(S, idx, w);
    REQUIRE(F.is_gap_weighted(2.0));
    auto rep = enumerate_ranges_singleton(F);
    log_m.push_back(std::log(static_cast<double>(m)));
    log_c.push_back(std::log(static_cast<double>(rep.distinct_count)));
    worst_count_ratio = std::max(
        worst_count_ratio, static_cast<double>(rep.distinct_count) /
                               (std::pow(m, 6.0) * std::log(m)));
  }
  // least-squares slope of log(count) on log(m)
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < log_m.size(); ++i) {
    mx += log_m[i];
    my += log_c[i];
  }
  mx /= log_m.size();
  my /= log_c.size();
  double num = 0, den = 0;
  for (std::size_t i = 0; i < log_m.size(); ++i) {
    num += (log_m[i] - mx) * (log_c[i] - my);
    den += (log_m[i] - mx) * (log_m[i] - mx);
  }
  double slope = num / den;
  MESSAGE("fitted range-count exponent: ", slope,
          ", max count/(m^6 log m): ", worst_count_ratio);
  CHECK(slope <= 7.0);
}

TEST_CASE("gap predicate") {
  auto M = line_instance(4);
  auto F = FunctionFamily::plain(M, {0, 1, 2, 3}, {1.0, 0.5, 0.25, 1.0}, 1.0);
  CHECK(F.is_gap_weighted(2.0));
  auto G = FunctionFamily::plain(M, {0, 1}, {1.0, 0.7}, 1.0);
  CHECK_FALSE(G.is_gap_weighted(2.0));
}
