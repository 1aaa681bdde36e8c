#include <doctest.h>

#include <cmath>

#include "chase/passage.hpp"

using namespace chase;

TEST_SUITE("passage") {

TEST_CASE("model validation") {
  CHECK_THROWS_AS(PassageModel::exponential(0.0), std::invalid_argument);
  CHECK_THROWS_AS(PassageModel::exponential(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(PassageModel::exponential(NAN), std::invalid_argument);
  CHECK_THROWS_AS(PassageModel::exponential(INFINITY), std::invalid_argument);
  CHECK_THROWS_AS(PassageModel::atomic(0.0, 2), std::invalid_argument);
  CHECK_THROWS_AS(PassageModel::atomic(1.0, 2), std::invalid_argument);
  CHECK_THROWS_AS(PassageModel::atomic(0.5, 0), std::invalid_argument);
  CHECK(PassageModel::exponential(2.0).describe() == "exponential(lambda=2)");
  CHECK(PassageModel::atomic(0.25, 8).describe() == "atomic(p=0.25,m=8)");
}

TEST_CASE("quantiles") {
  const auto e = PassageModel::exponential(2.0);
  CHECK(e.quantile(SpreadColor::Red, 0.5) == doctest::Approx(std::log(2.0) / 2.0));
  CHECK(e.quantile(SpreadColor::Blue, 0.5) == doctest::Approx(std::log(2.0)));
  const auto a = PassageModel::atomic(0.3, 7);
  CHECK(a.quantile(SpreadColor::Red, 0.29) == 1.0);
  CHECK(std::isinf(a.quantile(SpreadColor::Red, 0.31)));
  CHECK(a.quantile(SpreadColor::Blue, 0.29) == 0.0);
  CHECK(a.quantile(SpreadColor::Blue, 0.31) == 7.0);
}

TEST_CASE("edge hashing: canonical pairs, colors, seeds") {
  const auto line = Topology::line();
  const auto ori = Topology::oriented(2);
  for (std::uint64_t seed : {0ULL, 1ULL, 12345ULL}) {
    CHECK(edge_hash(seed, line, {3, 5}, SpreadColor::Red) ==
          edge_hash(seed, line, {5, 3}, SpreadColor::Red));
    CHECK(edge_hash(seed, ori, {1, 4}, SpreadColor::Red) !=
          edge_hash(seed, ori, {4, 1}, SpreadColor::Red));
    CHECK(edge_hash(seed, line, {3, 5}, SpreadColor::Red) !=
          edge_hash(seed, line, {3, 5}, SpreadColor::Blue));
  }
  CHECK(edge_hash(1, line, {3, 5}, SpreadColor::Red) != edge_hash(2, line, {3, 5}, SpreadColor::Red));
}

TEST_CASE("uniforms are in (0,1) with the right moments") {
  const auto t = Topology::lattice(2);
  double sum = 0.0, sum2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = edge_uniform(42, t, {static_cast<VertexKey>(i), static_cast<VertexKey>(i + 7)},
                                  SpreadColor::Red);
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    sum += u;
    sum2 += u * u;
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.005));
  CHECK(sum2 / n == doctest::Approx(1.0 / 3.0).epsilon(0.005));
}

TEST_CASE("exponential passage mean") {
  const auto t = Topology::half_line();
  const auto m = PassageModel::exponential(4.0);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    sum += passage_time(9, t, {static_cast<VertexKey>(i), static_cast<VertexKey>(i + 1)},
                        SpreadColor::Red, m);
  }
  CHECK(sum / n == doctest::Approx(0.25).epsilon(0.01));
}

TEST_CASE("mix64 is a bijection on a sample") {
  std::vector<std::uint64_t> v;
  for (std::uint64_t i = 0; i < 100000; ++i) v.push_back(mix64(i));
  std::sort(v.begin(), v.end());
  CHECK(std::adjacent_find(v.begin(), v.end()) == v.end());
  CHECK(mix64(0) == 0xE220A8397B1DCDAFULL);  // SplitMix64 first output from state 0
}

}  // TEST_SUITE
