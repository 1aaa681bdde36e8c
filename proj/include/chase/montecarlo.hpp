#pragma once

// Repeated-run survival estimation on top of the engine.
//
// Run i of an experiment uses seed run_seed(base_seed, i), and results are
// merged by run index, so every estimate is a deterministic function of the
// configuration regardless of how many workers share the runs.

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "chase/engine.hpp"

namespace chase {

enum class CensoredPolicy { CountAsFailure, Exclude };

struct ExperimentConfig {
  Topology topology = Topology::half_line();
  PassageModel model = PassageModel::exponential(1.0);
  StoppingRule stop;
  std::uint64_t runs = 1000;
  std::uint64_t base_seed = 1;
  unsigned workers = 1;
  CensoredPolicy censored = CensoredPolicy::CountAsFailure;

  void validate() const;
};

class SeedCollision : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Per-run seed: a bijective mix of (base_seed, run_index).
std::uint64_t run_seed(std::uint64_t base_seed, std::uint64_t run_index);

/// Derives all per-run seeds and throws SeedCollision on a duplicate.
std::vector<std::uint64_t> run_seeds(std::uint64_t base_seed, std::uint64_t runs);

struct Interval {
  double low = 0.0;
  double high = 1.0;
};

/// 95% Wilson score interval for `successes` out of `trials`.
Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = 1.959963984540054);

struct EstimateResult {
  std::uint64_t runs = 0;
  std::uint64_t successes = 0;  ///< RedReachedRadius outcomes
  std::uint64_t censored = 0;
  double p_hat = 0.0;
  double ci_low = 0.0;
  double ci_high = 1.0;
  std::uint64_t base_seed = 0;
  double wall_time = 0.0;  ///< seconds; never written to experiment files
};

/// Runs `count` jobs on `workers` threads; job(i) writes its own slot.
void parallel_for(std::uint64_t count, unsigned workers,
                  const std::function<void(std::uint64_t)>& job);

/// All outcomes of an experiment, ordered by run index.
std::vector<Outcome> collect_outcomes(const ExperimentConfig& cfg);

EstimateResult summarize(const std::vector<Outcome>& outcomes, const ExperimentConfig& cfg);

EstimateResult estimate_survival(const ExperimentConfig& cfg);

enum class SweepParam { Lambda, M };

struct SweepRow {
  double param = 0.0;
  EstimateResult estimate;
  std::optional<std::string> error;  ///< set when this grid point failed
};

/// One estimate per grid value. Lambda sweeps use the exponential model,
/// m sweeps keep p from cfg.model (which must be atomic).
std::vector<SweepRow> sweep(const ExperimentConfig& cfg, SweepParam param,
                            const std::vector<double>& grid);

/// Parses "a:b:step" into an inclusive grid.
std::vector<double> parse_grid(const std::string& spec);

std::string sweep_csv_header();
std::string sweep_csv_row(const SweepRow& row);
std::string estimate_json(const EstimateResult& est, const ExperimentConfig& cfg,
                          std::optional<double> param = std::nullopt);

struct BracketResult {
  bool crossed = false;
  double lo = 0.0;
  double hi = 0.0;
  std::vector<std::pair<double, EstimateResult>> evaluations;
};

/// Bisection on lambda for the point where the survival-proxy estimate
/// crosses `threshold`. A heuristic locator of the proxy's crossing, not a
/// certified critical value; uniqueness of the crossing is not assumed.
BracketResult bracket_lambda_c(const ExperimentConfig& cfg, double lo, double hi,
                               double threshold, double tolerance);

/// Version string compiled into the library.
const char* version_string();

}  // namespace chase
