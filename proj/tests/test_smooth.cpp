#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>

#include "dmcore/errors.hpp"
#include "dmcore/smooth.hpp"
#include "support/corpus.hpp"
#include "support/smooth_checks.hpp"

using namespace dmcore;
using namespace dmtest;

namespace {

SmoothedMetric make_line_smoothed(const MetricSpace& M, const NetTree*& keep,
                                  double eps) {
  static std::vector<NetTree*> owned;  // keep alive for the test binary
  auto* T = new NetTree(build_simple_tree(M, build_hierarchy(M)));
  owned.push_back(T);
  keep = T;
  return SmoothedMetric(*T, eps);
}

}  // namespace

TEST_CASE("smoothing level on the three-point line") {
  auto M = coords_instance({0, 1, 3});
  NetTree T = build_simple_tree(M, build_hierarchy(M));
  SmoothedMetric S(T, 1.0 / 8);

  CHECK(S.smoothing_level(0, 0) == kLevelNegInf);
  CHECK(S.smoothing_level(1, 1) == kLevelNegInf);
  CHECK(S.smoothing_level(0, 1) == -3);  // forced at floor(log2 eps)
  CHECK(S.level_floor() == -3);

  for (int x = 0; x < 3; ++x)
    for (int y = 0; y < 3; ++y)
      if (x != y) CHECK(S.smoothing_level(x, y) >= S.level_floor());
}

TEST_CASE("delta values on the three-point line") {
  auto M = coords_instance({0, 1, 3});
  NetTree T = build_simple_tree(M, build_hierarchy(M));
  SmoothedMetric S(T, 1.0 / 8);

  CHECK(S.delta(0, 0) == 0.0);
  CHECK(S.delta(2, 2) == 0.0);
  CHECK(S.delta(0, 1) == doctest::Approx(1.0));
  CHECK(S.delta(1, 0) == doctest::Approx(1.0));

  auto ball = S.ball(0, 1.0);
  CHECK(std::find(ball.begin(), ball.end(), 0) != ball.end());
  CHECK(std::find(ball.begin(), ball.end(), 1) != ball.end());
}

TEST_CASE("ball extremes follow the distortion envelope") {
  for (const auto& [name, M] : small_corpus()) {
    if (M.n() < 2) continue;
    CAPTURE(name);
    NetTree T = build_simple_tree(M, build_hierarchy(M));
    SmoothedMetric S(T, 1.0 / 16);
    double c = T.c_cover(), eps = S.eps();
    double big = (1.0 + 4.0 * c * eps) * M.diameter() + 1e-6;
    CHECK(S.ball(0, big).size() == static_cast<std::size_t>(M.n()));
    double tiny = (1.0 - 4.0 * c * eps) * 1.0 - 1e-6;
    auto b = S.ball(0, tiny);
    CHECK(b == std::vector<int>{0});
  }
}

TEST_CASE("eps validation depends on the covering constant and exponent") {
  auto M = coords_instance({0, 1, 3});
  NetTree T = build_simple_tree(M, build_hierarchy(M));
  CHECK_THROWS_AS(SmoothedMetric(T, 0.2), validation_error);     // > 1/8
  CHECK_THROWS_AS(SmoothedMetric(T, 0.0), validation_error);
  CHECK_THROWS_AS(SmoothedMetric(T, 0.02, 2.0), validation_error);  // > 1/200
  CHECK_NOTHROW(SmoothedMetric(T, 1.0 / 8));
  CHECK_NOTHROW(SmoothedMetric(T, 1.0 / 200, 2.0));

  NetTree D = build_decomposition_tree(M, build_hierarchy(M), 1, 4.0);
  CHECK_THROWS_AS(SmoothedMetric(D, 1.0 / 8), validation_error);  // c = 2
  CHECK_NOTHROW(SmoothedMetric(D, 1.0 / 16));
}

TEST_CASE("distortion, descendant, smooth and cross-free hold on small instances") {
  for (const auto& [name, M] : small_corpus()) {
    if (M.n() < 2) continue;
    CAPTURE(name);
    NetTree T = build_simple_tree(M, build_hierarchy(M));
    for (double eps : {1.0 / 16, 1.0 / 32}) {
      SmoothedMetric S(T, eps);
      auto dist = check_distortion(S);
      CHECK_MESSAGE(dist.ok(), dist.first_failure);
      auto desc = check_descendant(S);
      CHECK_MESSAGE(desc.ok(), desc.first_failure);
      auto smooth = check_smooth_exact(S);
      CHECK_MESSAGE(smooth.ok(), smooth.first_failure);
      auto cross = check_cross_free_exact(S);
      CHECK_MESSAGE(cross.ok(), cross.first_failure);
    }
  }
}

TEST_CASE("power distortion at eps = 1/(100z)") {
  for (const auto& [name, M] : small_corpus()) {
    if (M.n() < 2) continue;
    CAPTURE(name);
    NetTree T = build_simple_tree(M, build_hierarchy(M));
    for (double z : {1.0, 2.0}) {
      SmoothedMetric S(T, 1.0 / (100.0 * z), z);
      auto res = check_power_distortion(S);
      CHECK_MESSAGE(res.ok(), res.first_failure);
    }
  }
}

TEST_CASE("properties also hold over decomposition trees") {
  auto M = random_euclidean(40, 2, 77);
  NetHierarchy H = build_hierarchy(M);
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    NetTree T = build_decomposition_tree(M, H, seed, 4.0);
    SmoothedMetric S(T, 1.0 / 32);
    CHECK(check_distortion(S).ok());
    CHECK(check_descendant(S).ok());
    CHECK(check_smooth_exact(S).ok());
    CHECK(check_cross_free_exact(S).ok());
  }
}
