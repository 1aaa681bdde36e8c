#pragma once

// Chase-escape on the oriented lattice with atomic passage times, and the
// oriented bond-percolation cluster that red spreads along.
//
// An oriented edge is open when its red passage time is 1. The cluster
// explorer uses the same per-edge hash as the engine, so under one seed the
// explored cluster and the simulated dynamics agree edge for edge.

#include <cstdint>
#include <string>
#include <vector>

#include "chase/engine.hpp"

namespace chase {

struct ClusterProbe {
  int d = 0;
  double p = 0.0;
  int generation_cap = 0;
  bool reached = false;      ///< some generation-L vertex is connected to the origin
  bool truncated = false;    ///< a frontier exceeded the budget; `reached` is then a lower bound
  std::vector<std::uint64_t> frontier_sizes;  ///< open-cluster size per generation 0..L
};

inline constexpr std::size_t kDefaultFrontierBudget = std::size_t{1} << 22;

/// Generation-by-generation BFS of the open cluster of the origin on the
/// oriented lattice of dimension d. p may be 0 or 1 here.
ClusterProbe explore_cluster(int d, double p, int generations, std::uint64_t seed,
                             std::size_t frontier_budget = kDefaultFrontierBudget);

struct PercolationRun {
  Outcome outcome;
  bool slow_first_edge = false;  ///< the aux -> origin blue time equals m
  bool cluster_reached = false;  ///< explore_cluster(...).reached for the same seed
  bool cluster_truncated = false;
  bool survived = false;         ///< red reached generation L
};

/// One chase-escape run with AtomicModel{p, m} on oriented Z^d, stopped when
/// red reaches generation L, together with the events it depends on.
PercolationRun run_percolation_ce(int d, double p, std::uint32_t m, int generations,
                                  std::uint64_t seed,
                                  std::uint64_t max_events = 50'000'000);

/// Survival estimate against the limiting value (1 - p) P(cluster reaches L).
struct LimitEstimate {
  int d = 0;
  double p = 0.0;
  std::uint32_t m = 0;
  int generations = 0;
  std::uint64_t runs = 0;
  double survival_hat = 0.0;
  double cluster_hat = 0.0;
  double slow_first_hat = 0.0;      ///< empirical frequency of the slow first blue edge
  double both_hat = 0.0;            ///< empirical frequency of slow first edge and cluster reached
  double target = 0.0;              ///< (1 - p) * cluster_hat
  double gap = 0.0;                 ///< target - survival_hat
  std::uint64_t inclusion_violations = 0;  ///< runs that survived outside slow-first and cluster
  std::uint64_t base_seed = 0;
};

/// For each m, runs `runs` seeded simulations (seed i shared across m) and
/// reports survival against the limiting target.
std::vector<LimitEstimate> limit_probe(int d, double p, const std::vector<std::uint32_t>& m_grid,
                                       int generations, std::uint64_t runs,
                                       std::uint64_t base_seed, unsigned workers = 1);

std::string limit_csv_header();
std::string limit_csv_row(const LimitEstimate& e);

}  // namespace chase
