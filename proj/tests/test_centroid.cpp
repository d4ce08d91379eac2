#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>

#include "dmcore/centroid.hpp"
#include "dmcore/coreset.hpp"
#include "dmcore/errors.hpp"
#include "dmcore/ranges.hpp"
#include "support/corpus.hpp"
#include "support/oracles.hpp"

using namespace dmcore;
using namespace dmtest;

TEST_CASE("a singleton S spans one invariant interval") {
  auto M = random_euclidean(20, 2, 3);
  NetTree T = build_simple_tree(M, build_hierarchy(M));
  std::vector<int> S = {4};
  auto iv = invariant_intervals(S, T);
  REQUIRE(iv.intervals.size() == 1);
  CHECK(iv.intervals[0].first == 0);
  CHECK(iv.intervals[0].second == T.top_level() + 1);
}

TEST_CASE("interval boundaries sit where the subtree partition coarsens") {
  auto M = coords_instance({0, 1, 3});
  NetTree T = build_simple_tree(M, build_hierarchy(M));
  std::vector<int> S = {0, 1, 2};
  auto iv = invariant_intervals(S, T);
  // partition by levels: {0}{1}{2} / {0,1}{2} / {0,1,2} -> breaks at 1 and 2
  REQUIRE(iv.intervals.size() == 3);
  CHECK(iv.intervals[0] == std::pair<int, int>{0, 1});
  CHECK(iv.intervals[1] == std::pair<int, int>{1, 2});
  CHECK(iv.intervals[2] == std::pair<int, int>{2, 3});
}

TEST_CASE("intervals partition the levels with at most |S|+1 pieces") {
  Rng rng(606);
  for (int trial = 0; trial < 100; ++trial) {
    auto M = random_euclidean(12 + static_cast<int>(rng.uniform_int(60)), 2,
                              rng.next_u64());
    NetTree T = build_simple_tree(M, build_hierarchy(M));
    int s_size = 1 + static_cast<int>(rng.uniform_int(8));
    std::set<int> S;
    while (static_cast<int>(S.size()) < std::min(s_size, M.n()))
      S.insert(static_cast<int>(rng.uniform_int(M.n())));
    std::vector<int> ids(S.begin(), S.end());
    auto iv = invariant_intervals(ids, T);
    CHECK(iv.intervals.size() <= ids.size() + 1);
    int expect = 0;
    for (auto [a, b] : iv.intervals) {
      CHECK(a == expect);
      CHECK(b > a);
      expect = b;
    }
    CHECK(expect == T.top_level() + 1);
  }
}

TEST_CASE("invariant intervals require a simple tree") {
  auto M = line_instance(6);
  NetTree D = build_decomposition_tree(M, build_hierarchy(M), 1, 4.0);
  std::vector<int> S = {0};
  CHECK_THROWS_AS(invariant_intervals(S, D), validation_error);
}

TEST_CASE("centroid sets contain their source and respect the size cap") {
  for (const auto& [name, M] : small_corpus()) {
    if (M.n() < 3) continue;
    CAPTURE(name);
    NetTree T = build_simple_tree(M, build_hierarchy(M));
    std::vector<int> S;
    for (int i = 0; i < M.n(); i += 2) S.push_back(i);
    std::vector<double> w(S.size(), 1.0);
    CentroidSet H = build_centroid_set(M, T, S, w, 0.1, 2, 1.0);
    for (int s : S)
      CHECK(std::binary_search(H.ids.begin(), H.ids.end(), s));
    CHECK(static_cast<double>(H.ids.size()) <= H.size_cap);
  }
}

TEST_CASE("centroid set parameter validation") {
  auto M = line_instance(5);
  NetTree T = build_simple_tree(M, build_hierarchy(M));
  std::vector<int> S = {0};
  std::vector<double> w = {1.0};
  CHECK_THROWS_AS(build_centroid_set(M, T, S, w, 0.6, 1, 2.0),
                  validation_error);  // eps >= 1/z
  CHECK_THROWS_AS(build_centroid_set(M, T, {}, {}, 0.1, 1, 2.0),
                  validation_error);
}

TEST_CASE("singleton-source centroid sets contain a near-optimal center") {
  for (const auto& [name, M] : small_corpus()) {
    if (M.n() < 3 || M.n() > 30) continue;
    CAPTURE(name);
    NetTree T = build_simple_tree(M, build_hierarchy(M));
    for (double z : {1.0, 2.0}) {
      double eps = 0.1;
      std::vector<int> S = {0};
      std::vector<double> w = {1.0};
      CentroidSet H = build_centroid_set(M, T, S, w, eps, 1, z);
      std::vector<int> all(M.n());
      for (int i = 0; i < M.n(); ++i) all[i] = i;
      double best_H = brute_best_cost(M, H.ids, S, w, 1, z);
      double best_X = brute_best_cost(M, all, S, w, 1, z);
      CHECK(best_H <= (1.0 + 16.0 * z * eps) * best_X + 1e-12);
    }
  }
}

TEST_CASE("centroid quality against the exhaustive optimum on small instances") {
  for (const auto& [name, M] : small_corpus()) {
    if (M.n() < 4 || M.n() > 25) continue;
    CAPTURE(name);
    NetTree T = build_simple_tree(M, build_hierarchy(M));
    std::vector<int> all(M.n());
    for (int i = 0; i < M.n(); ++i) all[i] = i;
    std::vector<double> unit(M.n(), 1.0);
    for (int k : {1, 2}) {
      for (double z : {1.0, 2.0}) {
        double eps = 0.1;
        CentroidSet H = build_centroid_set(M, T, all, unit, eps, k, z);
        double best_H = brute_best_cost(M, H.ids, all, unit, k, z);
        double best_X = brute_best_cost(M, all, all, unit, k, z);
        CAPTURE(k);
        CAPTURE(z);
        CHECK(best_H <= (1.0 + 16.0 * z * eps) * best_X + 1e-12);
      }
    }
  }
}

TEST_CASE("local search traces strictly decrease and keep k centers") {
  auto M = random_euclidean(30, 2, 44);
  std::vector<int> all(M.n());
  for (int i = 0; i < M.n(); ++i) all[i] = i;
  std::vector<double> unit(M.n(), 1.0);
  auto [centers, trace] =
      local_search(M, all, all, unit, 3, 2.0, 1, 1.0, 12);
  CHECK(centers.size() == 3);
  std::set<int> uniq(centers.begin(), centers.end());
  CHECK(uniq.size() == 3);
  double prev = trace.initial_cost;
  for (const auto& step : trace.steps) {
    CHECK(step.cost < prev);
    prev = step.cost;
  }
  CHECK(trace.final_cost == doctest::Approx(prev));
}

TEST_CASE("full-width swaps reach the exhaustive optimum") {
  for (const auto& [name, M] : small_corpus()) {
    if (M.n() < 4 || M.n() > 12) continue;
    CAPTURE(name);
    NetTree T = build_simple_tree(M, build_hierarchy(M));
    std::vector<int> all(M.n());
    for (int i = 0; i < M.n(); ++i) all[i] = i;
    std::vector<double> unit(M.n(), 1.0);
    int k = 2;
    CentroidSet H = build_centroid_set(M, T, all, unit, 0.1, k, 2.0);
    auto [centers, trace] =
        local_search(M, H.ids, all, unit, k, 2.0, k, 1.0, 5);
    double best_H = brute_best_cost(M, H.ids, all, unit, k, 2.0);
    CHECK(trace.final_cost == doctest::Approx(best_H).epsilon(1e-9));
  }
}

TEST_CASE("rho above k is rejected") {
  auto M = line_instance(6);
  std::vector<int> all = {0, 1, 2, 3, 4, 5};
  std::vector<double> unit(6, 1.0);
  CHECK_THROWS_AS(local_search(M, all, all, unit, 2, 1.0, 3, 1.0, 0),
                  validation_error);
}

TEST_CASE("coreset to centroid set to local search lands near the optimum") {
  // statistical end-to-end: >= 90% of seeds within the documented factor
  int good = 0, seeds = 20;
  auto M = random_euclidean(25, 2, 321);
  std::vector<int> all(M.n());
  for (int i = 0; i < M.n(); ++i) all[i] = i;
  std::vector<double> unit(M.n(), 1.0);
  int k = 2;
  double z = 2.0, eps = 0.2;
  double opt = brute_best_cost(M, all, all, unit, k, z);
  for (int s = 0; s < seeds; ++s) {
    CoresetParams cp;
    cp.k = k;
    cp.z = z;
    cp.eps = 0.005;
    cp.tau = 0.005;
    cp.seed = 9900 + s;
    cp.size_override = 40;
    WeightedCoreset W = build_coreset(M, cp);
    std::map<int, double> support;
    for (const auto& e : W.entries) support[e.id] += e.weight;
    std::vector<int> S;
    std::vector<double> w;
    for (auto& [id, weight] : support) {
      S.push_back(id);
      w.push_back(weight);
    }
    NetTree T = build_simple_tree(M, build_hierarchy(M));
    CentroidSet H = build_centroid_set(M, T, S, w, eps / (2 * z), k, z);
    auto [centers, trace] =
        local_search(M, H.ids, S, w, k, z, k, 1.0, 31000 + s);
    double full = 0.0;
    for (int x = 0; x < M.n(); ++x)
      full += pow_z(M.distance_to_set(x, centers), z);
    if (full <= 1.5 * opt + 1e-12) ++good;
  }
  MESSAGE("pipeline within 1.5x optimum in ", good, "/", seeds, " seeds");
  CHECK(good >= 18);
}
