#include <doctest.h>

#include "chase/analytic.hpp"
#include "chase/percolation.hpp"
#include "oracles.hpp"

using namespace chase;

TEST_SUITE("percolation") {

TEST_CASE("cluster extremes") {
  const auto closed = explore_cluster(3, 0.0, 5, 1);
  CHECK_FALSE(closed.reached);
  CHECK(closed.frontier_sizes == std::vector<std::uint64_t>{1, 0});
  const auto open = explore_cluster(3, 1.0, 6, 1);
  CHECK(open.reached);
  for (int g = 0; g <= 6; ++g) {
    // sites of N^3 at l1 distance g
    CHECK(open.frontier_sizes[g] == binomial_saturating(g + 2, 2));
  }
  const auto capped = explore_cluster(4, 1.0, 30, 1, 100);
  CHECK(capped.truncated);
  CHECK_FALSE(capped.reached);
  CHECK_THROWS_AS(explore_cluster(0, 0.5, 3, 1), std::invalid_argument);
  CHECK_THROWS_AS(explore_cluster(2, 1.5, 3, 1), std::invalid_argument);
  CHECK_THROWS_AS(explore_cluster(2, 0.5, 0, 1), std::invalid_argument);
}

TEST_CASE("cluster frontier matches a coordinate-space BFS") {
  const Topology t = Topology::oriented(3);
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const auto probe = explore_cluster(3, 0.45, 12, seed);
    std::set<std::vector<std::int64_t>> frontier{{0, 0, 0}};
    for (int g = 1; g <= 12 && !frontier.empty(); ++g) {
      std::set<std::vector<std::int64_t>> next;
      for (const auto& x : frontier) {
        for (int j = 0; j < 3; ++j) {
          auto y = x;
          ++y[j];
          if (edge_uniform(seed, t, {t.encode(x), t.encode(y)}, SpreadColor::Red) < 0.45) {
            next.insert(y);
          }
        }
      }
      frontier.swap(next);
      REQUIRE(probe.frontier_sizes.size() > static_cast<std::size_t>(g));
      CHECK(probe.frontier_sizes[g] == frontier.size());
      if (frontier.empty()) CHECK(probe.frontier_sizes.size() == static_cast<std::size_t>(g) + 1);
    }
    CHECK(probe.reached == !frontier.empty());
  }
}

TEST_CASE("red only ever occupies open-cluster sites") {
  const int d = 4, L = 10;
  const double p = 0.4;
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    const Topology t = Topology::oriented(d);
    Simulation sim(t, PassageModel::atomic(p, 8), StoppingRule{static_cast<std::uint64_t>(L)},
                   seed);
    std::vector<TraceRecord> trace;
    sim.set_trace([&](const TraceRecord& r) { trace.push_back(r); });
    sim.run();
    for (const auto& r : trace) {
      if (r.applied && r.color == SpreadColor::Red) {
        CHECK(edge_uniform(seed, t, {r.from, r.to}, SpreadColor::Red) < p);
        CHECK(r.fire_time == static_cast<double>(t.distance_to_root(r.to)));
      }
    }
  }
}

TEST_CASE("per-run event inclusion") {
  for (std::uint64_t seed = 1; seed <= 400; ++seed) {
    const auto run = run_percolation_ce(5, 0.3, 4, 12, seed);
    if (run.survived) {
      CHECK(run.slow_first_edge);
      CHECK(run.cluster_reached);
    }
    if (!run.slow_first_edge) CHECK(run.outcome.extinction_time == 0.0);
  }
}

TEST_CASE("limit probe rows") {
  const std::vector<std::uint32_t> ms{1, 4, 16};
  const auto rows = limit_probe(6, 0.25, ms, 10, 1500, 3, 1);
  REQUIRE(rows.size() == 3);
  for (const auto& r : rows) {
    CHECK(r.inclusion_violations == 0);
    CHECK(r.target == doctest::Approx((1 - r.p) * r.cluster_hat));
    CHECK(r.gap == doctest::Approx(r.target - r.survival_hat));
    CHECK(r.survival_hat <= r.both_hat);
    CHECK(std::fabs(r.slow_first_hat - 0.75) <= oracle::three_se(0.75, 1500));
    CHECK(r.base_seed == 3);
  }
  CHECK(rows[0].survival_hat <= rows[1].survival_hat);
  CHECK(rows[1].survival_hat <= rows[2].survival_hat);
  CHECK(limit_probe(6, 0.25, ms, 10, 1500, 3, 5).back().survival_hat == rows.back().survival_hat);
  CHECK(limit_csv_header() == "d,p,m,L,runs,survival_hat,cluster_hat,target,gap,base_seed");
  CHECK(limit_csv_row(rows[0]).rfind("6,0.25,1,10,1500,", 0) == 0);
  CHECK_THROWS_AS(limit_probe(6, 0.25, ms, 10, 0, 3), std::invalid_argument);
}

}  // TEST_SUITE
