#include "chase/percolation.hpp"

#include <stdexcept>

#include <absl/container/flat_hash_set.h>
#include <fmt/format.h>

#include "chase/montecarlo.hpp"

namespace chase {

ClusterProbe explore_cluster(int d, double p, int generations, std::uint64_t seed,
                             std::size_t frontier_budget) {
  if (d < 1) throw std::invalid_argument("dimension must be >= 1");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in [0, 1]");
  if (generations < 1) throw std::invalid_argument("generation cap must be >= 1");

  const Topology topology = Topology::oriented(d);
  ClusterProbe probe;
  probe.d = d;
  probe.p = p;
  probe.generation_cap = generations;

  std::vector<VertexKey> frontier{kRootVertex};
  std::vector<VertexKey> succ;
  absl::flat_hash_set<VertexKey> next;
  probe.frontier_sizes.push_back(1);
  for (int g = 0; g < generations; ++g) {
    next.clear();
    for (VertexKey v : frontier) {
      topology.successor_keys(v, succ);
      for (VertexKey w : succ) {
        if (edge_uniform(seed, topology, {v, w}, SpreadColor::Red) < p) next.insert(w);
      }
      if (next.size() > frontier_budget) break;
    }
    if (next.size() > frontier_budget) {
      probe.truncated = true;
      break;
    }
    probe.frontier_sizes.push_back(next.size());
    if (next.empty()) break;
    frontier.assign(next.begin(), next.end());
  }
  probe.reached = !probe.truncated &&
                  probe.frontier_sizes.size() == static_cast<std::size_t>(generations) + 1 &&
                  probe.frontier_sizes.back() > 0;
  return probe;
}

PercolationRun run_percolation_ce(int d, double p, std::uint32_t m, int generations,
                                  std::uint64_t seed, std::uint64_t max_events) {
  const Topology topology = Topology::oriented(d);
  const PassageModel model = PassageModel::atomic(p, m);
  StoppingRule stop;
  stop.max_radius = static_cast<std::uint64_t>(generations);
  stop.max_events = max_events;

  PercolationRun run;
  run.outcome = simulate(topology, model, stop, seed);
  run.slow_first_edge =
      passage_time(seed, topology, {kAuxVertex, kRootVertex}, SpreadColor::Blue, model) > 0.0;
  const ClusterProbe probe = explore_cluster(d, p, generations, seed);
  run.cluster_reached = probe.reached;
  run.cluster_truncated = probe.truncated;
  run.survived = run.outcome.status == OutcomeStatus::RedReachedRadius;
  return run;
}

std::vector<LimitEstimate> limit_probe(int d, double p, const std::vector<std::uint32_t>& m_grid,
                                       int generations, std::uint64_t runs,
                                       std::uint64_t base_seed, unsigned workers) {
  if (runs < 1) throw std::invalid_argument("runs must be >= 1");
  const std::vector<std::uint64_t> seeds = run_seeds(base_seed, runs);
  const Topology topology = Topology::oriented(d);

  // Cluster and first-edge events do not depend on m.
  std::vector<char> cluster(runs), slow_first(runs);
  parallel_for(runs, workers, [&](std::uint64_t i) {
    cluster[i] = explore_cluster(d, p, generations, seeds[i]).reached;
    slow_first[i] = edge_uniform(seeds[i], topology, {kAuxVertex, kRootVertex},
                                 SpreadColor::Blue) >= p;
  });
  std::uint64_t cluster_count = 0, slow_count = 0, both_count = 0;
  for (std::uint64_t i = 0; i < runs; ++i) {
    cluster_count += cluster[i];
    slow_count += slow_first[i];
    both_count += cluster[i] && slow_first[i];
  }

  std::vector<LimitEstimate> out;
  for (std::uint32_t m : m_grid) {
    const PassageModel model = PassageModel::atomic(p, m);
    StoppingRule stop;
    stop.max_radius = static_cast<std::uint64_t>(generations);
    std::vector<char> survived(runs);
    parallel_for(runs, workers, [&](std::uint64_t i) {
      survived[i] = simulate(topology, model, stop, seeds[i]).status ==
                    OutcomeStatus::RedReachedRadius;
    });
    LimitEstimate e;
    e.d = d;
    e.p = p;
    e.m = m;
    e.generations = generations;
    e.runs = runs;
    e.base_seed = base_seed;
    std::uint64_t survived_count = 0;
    for (std::uint64_t i = 0; i < runs; ++i) {
      survived_count += survived[i];
      if (survived[i] && !(cluster[i] && slow_first[i])) ++e.inclusion_violations;
    }
    const double n = static_cast<double>(runs);
    e.survival_hat = static_cast<double>(survived_count) / n;
    e.cluster_hat = static_cast<double>(cluster_count) / n;
    e.slow_first_hat = static_cast<double>(slow_count) / n;
    e.both_hat = static_cast<double>(both_count) / n;
    e.target = (1.0 - p) * e.cluster_hat;
    e.gap = e.target - e.survival_hat;
    out.push_back(e);
  }
  return out;
}

std::string limit_csv_header() {
  return "d,p,m,L,runs,survival_hat,cluster_hat,target,gap,base_seed";
}

std::string limit_csv_row(const LimitEstimate& e) {
  return fmt::format("{},{},{},{},{},{},{},{},{},{}", e.d, e.p, e.m, e.generations, e.runs,
                     e.survival_hat, e.cluster_hat, e.target, e.gap, e.base_seed);
}

}  // namespace chase
