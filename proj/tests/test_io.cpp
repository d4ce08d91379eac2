#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <string>

#include "dmcore/errors.hpp"
#include "dmcore/io.hpp"
#include "dmcore/net.hpp"
#include "support/corpus.hpp"

using namespace dmcore;

TEST_CASE("coordinate tables: plain, with header, with id column") {
  auto plain = load_metric_csv("0\n1\n3\n", InputFormat::kCoordinates);
  CHECK(plain.n() == 3);
  CHECK(plain.distance(0, 2) == doctest::Approx(3.0));

  auto header = load_metric_csv("x,y\n0,0\n1,0\n3,0\n",
                                InputFormat::kCoordinates);
  CHECK(header.n() == 3);
  CHECK(header.dim() == 2);

  // rows arrive shuffled; the id column restores the order
  auto with_id = load_metric_csv("id,x\n2,3\n0,0\n1,1\n",
                                 InputFormat::kCoordinates);
  CHECK(with_id.n() == 3);
  CHECK(with_id.distance(0, 1) == doctest::Approx(1.0));
  CHECK(with_id.distance(0, 2) == doctest::Approx(3.0));
}

TEST_CASE("matrix tables accept an optional header row") {
  std::string body = "0,1,3\n1,0,2\n3,2,0\n";
  auto no_header = load_metric_csv(body, InputFormat::kMatrix);
  CHECK(no_header.n() == 3);
  CHECK(no_header.distance(0, 2) == doctest::Approx(3.0));

  auto with_header = load_metric_csv("a,b,c\n" + body, InputFormat::kMatrix);
  CHECK(with_header.n() == 3);
}

TEST_CASE("malformed inputs are rejected with validation errors") {
  CHECK_THROWS_AS(load_metric_csv("", InputFormat::kCoordinates),
                  validation_error);
  CHECK_THROWS_AS(load_metric_csv("x\n", InputFormat::kCoordinates),
                  validation_error);
  CHECK_THROWS_AS(load_metric_csv("0,1\n1,0,2\n", InputFormat::kMatrix),
                  validation_error);
  CHECK_THROWS_AS(load_metric_csv("0,abc\nabc,0\n", InputFormat::kMatrix),
                  validation_error);
}

TEST_CASE("gzip files load transparently") {
  std::string dir = std::string(std::getenv("TMPDIR") ? std::getenv("TMPDIR")
                                                      : "/tmp");
  std::string path = dir + "/dmcore-io-test.csv";
  write_file(path, "x\n0\n1\n3\n");
  REQUIRE(std::system(("gzip -f " + path).c_str()) == 0);
  auto M = load_metric_file(path + ".gz", InputFormat::kCoordinates);
  CHECK(M.n() == 3);
  std::remove((path + ".gz").c_str());
}

TEST_CASE("matrix export round-trips through the loader") {
  auto M = dmcore::hard_instance(2);
  auto R = load_metric_csv(metric_to_matrix_csv(M), InputFormat::kMatrix);
  CHECK(R.n() == M.n());
  for (int i = 0; i < M.n(); ++i)
    for (int j = 0; j < M.n(); ++j)
      CHECK(R.distance(i, j) == doctest::Approx(M.distance(i, j)));
}

TEST_CASE("doubling estimate survives the subsampled-center path") {
  auto M = dmtest::random_euclidean(700, 2, 99);
  double t = estimate_doubling_dim(M);
  CHECK(t > 0.5);
  CHECK(t < 6.0);
}

TEST_CASE("hierarchies accept a custom greedy order") {
  auto M = dmtest::coords_instance({0, 1, 3});
  std::vector<int> reversed = {2, 1, 0};
  NetHierarchy H = build_hierarchy(M, reversed);
  // scanning from the right admits coordinate 3 first, then coordinate 1
  // (their distance is exactly the level radius 2), which excludes 0
  CHECK(H.levels[1] == std::vector<int>{1, 2});
  std::vector<int> bad = {0, 1};
  CHECK_THROWS_AS(build_hierarchy(M, bad), validation_error);
}
