#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "dmcore/errors.hpp"
#include "dmcore/net.hpp"
#include "dmcore/rng.hpp"
#include "support/corpus.hpp"

using namespace dmcore;
using namespace dmtest;

namespace {

void check_packing_covering(const MetricSpace& M, const NetHierarchy& H) {
  for (int lvl = 1; lvl <= H.L; ++lvl) {
    double radius = std::ldexp(1.0, lvl);
    const auto& net = H.levels[lvl];
    for (std::size_t a = 0; a < net.size(); ++a)
      for (std::size_t b = a + 1; b < net.size(); ++b)
        CHECK(M.distance(net[a], net[b]) >= radius - 1e-9);
    for (int x : H.levels[lvl - 1]) {
      double best = 1e300;
      for (int u : net) best = std::min(best, M.distance(x, u));
      CHECK(best <= radius + 1e-9);
    }
  }
}

void check_tree_covering(const MetricSpace& M, const NetTree& T) {
  const auto& H = T.hierarchy();
  double c = T.c_cover();
  for (int lvl = 0; lvl < H.L; ++lvl) {
    double edge_budget = c * std::ldexp(1.0, lvl + 1);
    for (int u : H.levels[lvl]) {
      int p = T.parent_at(u, lvl + 1);
      CHECK(H.contains(lvl + 1, p));
      CHECK(M.distance(u, p) <= edge_budget + 1e-9);
    }
  }
  // path-summed ancestor bound with constant 4c
  for (int x = 0; x < M.n(); ++x)
    for (int lvl = 1; lvl <= H.L; ++lvl)
      CHECK(M.distance(x, T.parent_at(x, lvl)) <=
            4.0 * c * std::ldexp(1.0, lvl) + 1e-9);
}

}  // namespace

TEST_CASE("greedy hierarchy on the three-point line") {
  auto M = coords_instance({0, 1, 3});
  NetHierarchy H = build_hierarchy(M);
  CHECK(H.L == 2);
  CHECK(H.levels[1] == std::vector<int>{0, 2});
  CHECK(H.levels[2] == std::vector<int>{0});
}

TEST_CASE("single point hierarchy") {
  auto M = MetricSpace::from_coordinates({{0.0}});
  NetHierarchy H = build_hierarchy(M);
  CHECK(H.L == 0);
  CHECK(H.levels[0] == std::vector<int>{0});
  NetTree T = build_simple_tree(M, H);
  CHECK(T.parent_at(0, 0) == 0);
  CHECK(T.parent_at(0, -5) == 0);
}

TEST_CASE("hierarchy packing and covering invariants on the corpus") {
  for (const auto& [name, M] : standard_corpus()) {
    CAPTURE(name);
    NetHierarchy H = build_hierarchy(M);
    double diam = M.diameter();
    CHECK(std::ldexp(1.0, H.L - 1) <= diam + 1e-9);
    CHECK(diam < std::ldexp(1.0, H.L));
    CHECK(H.levels[H.L].size() == 1);
    check_packing_covering(M, H);
  }
}

TEST_CASE("simple tree parents are nearest upper net points") {
  auto M = coords_instance({0, 1, 3});
  NetTree T = build_simple_tree(M, build_hierarchy(M));
  CHECK(T.parent_at(1, 1) == 0);   // nearest of {0, 3} to coordinate 1
  CHECK(T.parent_at(2, 1) == 2);   // net members are their own ancestors
  CHECK(T.parent_at(0, 2) == 0);
  CHECK(T.parent_at(2, 2) == 0);   // everyone reaches the root
  CHECK(T.parent_at(1, 0) == 1);
  CHECK_THROWS_AS(T.parent_at(0, 3), validation_error);
}

TEST_CASE("simple trees are 1-covering across the corpus") {
  for (const auto& [name, M] : standard_corpus()) {
    CAPTURE(name);
    NetTree T = build_simple_tree(M, build_hierarchy(M));
    CHECK(T.c_cover() == 1.0);
    check_tree_covering(M, T);
  }
}

TEST_CASE("decomposition trees are seeded-deterministic and 2-covering") {
  for (const auto& [name, M] : standard_corpus()) {
    CAPTURE(name);
    NetHierarchy H = build_hierarchy(M);
    double chi = std::max(2.0, std::ldexp(1.0, static_cast<int>(std::ceil(
                                  estimate_doubling_dim(M)))));
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      NetTree A = build_decomposition_tree(M, H, seed, chi);
      CHECK(A.c_cover() == 2.0);
      check_tree_covering(M, A);
      if (seed == 3) {
        NetTree B = build_decomposition_tree(M, H, seed, chi);
        CHECK(A.to_json() == B.to_json());
      }
    }
  }
}

TEST_CASE("decomposition tree on a single point is a chain") {
  auto M = MetricSpace::from_coordinates({{0.0}});
  NetTree T = build_decomposition_tree(M, build_hierarchy(M), 7, 4.0);
  CHECK(T.parent_at(0, 0) == 0);
}

TEST_CASE("net levels obey the packing count inside balls") {
  for (const auto& [name, M] : standard_corpus()) {
    CAPTURE(name);
    if (M.n() > 120) continue;
    NetHierarchy H = build_hierarchy(M);
    double t_hat = std::max(1.0, estimate_doubling_dim(M));
    Rng rng(99);
    for (int trial = 0; trial < 12; ++trial) {
      int x = static_cast<int>(rng.uniform_int(M.n()));
      double R = std::ldexp(1.0, static_cast<int>(rng.uniform_int(H.L + 1)));
      for (int lvl = 1; lvl <= H.L; ++lvl) {
        double scale = std::ldexp(1.0, lvl);
        if (R < scale) continue;
        std::size_t inside = 0;
        for (int u : H.levels[lvl])
          if (M.distance(x, u) <= R) ++inside;
        CHECK(static_cast<double>(inside) <=
              std::pow(4.0 * R / scale, t_hat) + 1e-6);
      }
    }
  }
}

TEST_CASE("small sets are rarely cut at high levels") {
  auto M = grid_instance(10, 10);
  NetHierarchy H = build_hierarchy(M);
  double t_hat = std::max(1.0, estimate_doubling_dim(M));
  // a fixed small set: one cell and its right neighbor
  std::vector<int> P = {34, 35};
  double diam_p = M.distance(P[0], P[1]);
  int seeds = 500;
  std::vector<double> frac(H.L + 1, 0.0);
  for (int s = 0; s < seeds; ++s) {
    NetTree T = build_decomposition_tree(M, H, 1000 + s, 4.0);
    for (int lvl = 0; lvl <= H.L; ++lvl)
      if (!contained_at_level(T, P, lvl)) frac[lvl] += 1.0 / seeds;
  }
  // cut fraction is nonincreasing in the level
  for (int lvl = 1; lvl <= H.L; ++lvl) CHECK(frac[lvl] <= frac[lvl - 1] + 1e-12);
  // fit the constant K in frac <= K * 2^-lvl * ddim * diam(P), then require
  // every level to sit within slack 4 of the fit
  double k_fit = 0.0;
  int used = 0;
  for (int lvl = 1; lvl <= H.L; ++lvl) {
    if (frac[lvl] <= 0.0) continue;
    k_fit += frac[lvl] * std::ldexp(1.0, lvl) / (t_hat * diam_p);
    ++used;
  }
  REQUIRE(used > 0);
  k_fit /= used;
  MESSAGE("fitted cut-probability constant K = ", k_fit);
  for (int lvl = 1; lvl <= H.L; ++lvl)
    CHECK(frac[lvl] <=
          4.0 * k_fit * std::ldexp(1.0, -lvl) * t_hat * diam_p + 1e-9);
}

TEST_CASE("fan-out statistic is finite and reported") {
  auto M = random_euclidean(80, 2, 5);
  NetTree T = build_decomposition_tree(M, build_hierarchy(M), 3, 4.0);
  int fanout = T.max_fanout();
  CHECK(fanout >= 1);
  MESSAGE("max decomposition fan-out: ", fanout);
}

TEST_CASE("tree JSON round-trips the declared schema fields") {
  auto M = coords_instance({0, 1, 3});
  NetTree T = build_simple_tree(M, build_hierarchy(M));
  std::string j = T.to_json();
  CHECK(j.find("\"levels\"") != std::string::npos);
  CHECK(j.find("\"parent\"") != std::string::npos);
  CHECK(j.find("\"flavor\"") != std::string::npos);
  CHECK(j.find("\"c_cover\"") != std::string::npos);
}
