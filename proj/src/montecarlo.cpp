#include "chase/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include <fmt/format.h>
#include <json.hpp>

#ifndef CHASE_VERSION
#define CHASE_VERSION "unknown"
#endif

namespace chase {

const char* version_string() { return CHASE_VERSION; }

void ExperimentConfig::validate() const {
  if (runs < 1) throw std::invalid_argument("runs must be >= 1");
  if (workers < 1) throw std::invalid_argument("workers must be >= 1");
  stop.validate();
}

std::uint64_t run_seed(std::uint64_t base_seed, std::uint64_t run_index) {
  return mix64(base_seed ^ mix64(run_index));
}

std::vector<std::uint64_t> run_seeds(std::uint64_t base_seed, std::uint64_t runs) {
  std::vector<std::uint64_t> seeds(runs);
  for (std::uint64_t i = 0; i < runs; ++i) seeds[i] = run_seed(base_seed, i);
  std::vector<std::uint64_t> sorted = seeds;
  std::sort(sorted.begin(), sorted.end());
  auto dup = std::adjacent_find(sorted.begin(), sorted.end());
  if (dup != sorted.end()) {
    throw SeedCollision(fmt::format("per-run seed collision: seed {} repeats under base seed {}",
                                    *dup, base_seed));
  }
  return seeds;
}

Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z) {
  if (trials == 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double phat = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (phat + z2 / (2.0 * n)) / denom;
  const double half = z / denom * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n));
  return {std::clamp(center - half, 0.0, phat), std::clamp(center + half, phat, 1.0)};
}

void parallel_for(std::uint64_t count, unsigned workers,
                  const std::function<void(std::uint64_t)>& job) {
  workers = std::max(1u, workers);
  if (workers == 1 || count <= 1) {
    for (std::uint64_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  const unsigned n_threads = static_cast<unsigned>(std::min<std::uint64_t>(workers, count));
  pool.reserve(n_threads);
  for (unsigned w = 0; w < n_threads; ++w) {
    pool.emplace_back([&] {
      for (std::uint64_t i = next++; i < count; i = next++) {
        try {
          job(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<Outcome> collect_outcomes(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::vector<std::uint64_t> seeds = run_seeds(cfg.base_seed, cfg.runs);
  std::vector<Outcome> outcomes(cfg.runs);
  parallel_for(cfg.runs, cfg.workers, [&](std::uint64_t i) {
    outcomes[i] = simulate(cfg.topology, cfg.model, cfg.stop, seeds[i]);
  });
  return outcomes;
}

EstimateResult summarize(const std::vector<Outcome>& outcomes, const ExperimentConfig& cfg) {
  EstimateResult est;
  est.runs = outcomes.size();
  est.base_seed = cfg.base_seed;
  for (const Outcome& o : outcomes) {
    if (o.status == OutcomeStatus::RedReachedRadius) ++est.successes;
    if (o.status == OutcomeStatus::Censored) ++est.censored;
  }
  const std::uint64_t trials =
      cfg.censored == CensoredPolicy::Exclude ? est.runs - est.censored : est.runs;
  est.p_hat = trials == 0 ? 0.0 : static_cast<double>(est.successes) / static_cast<double>(trials);
  const Interval ci = wilson_interval(est.successes, trials);
  est.ci_low = ci.low;
  est.ci_high = ci.high;
  return est;
}

EstimateResult estimate_survival(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  EstimateResult est = summarize(collect_outcomes(cfg), cfg);
  est.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return est;
}

std::vector<SweepRow> sweep(const ExperimentConfig& cfg, SweepParam param,
                            const std::vector<double>& grid) {
  if (grid.empty()) throw std::invalid_argument("sweep grid is empty");
  std::vector<double> ordered = grid;
  std::sort(ordered.begin(), ordered.end());
  std::vector<SweepRow> rows;
  rows.reserve(ordered.size());
  for (double value : ordered) {
    SweepRow row;
    row.param = value;
    row.estimate.base_seed = cfg.base_seed;
    try {
      ExperimentConfig point = cfg;
      if (param == SweepParam::Lambda) {
        point.model = PassageModel::exponential(value);
      } else {
        if (!cfg.model.is_atomic()) throw std::invalid_argument("m sweeps need the atomic model");
        if (value < 1.0 || value != std::floor(value) || value > 4294967295.0) {
          throw std::invalid_argument(fmt::format("m must be a positive integer, got {}", value));
        }
        point.model = PassageModel::atomic(cfg.model.as_atomic().p,
                                           static_cast<std::uint32_t>(value));
      }
      row.estimate = estimate_survival(point);
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<double> parse_grid(const std::string& spec) {
  std::vector<double> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t colon = spec.find(':', start);
    const std::string piece = spec.substr(start, colon == std::string::npos ? std::string::npos
                                                                            : colon - start);
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(piece, &used));
      if (used != piece.size()) throw std::invalid_argument(piece);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad grid '" + spec + "': expected a:b:step");
    }
    if (colon == std::string::npos) break;
    start = colon + 1;
  }
  if (parts.size() == 1) return parts;
  if (parts.size() != 3) throw std::invalid_argument("bad grid '" + spec + "': expected a:b:step");
  const double a = parts[0], b = parts[1], step = parts[2];
  if (!(step > 0.0) || b < a) throw std::invalid_argument("bad grid '" + spec + "': need a <= b, step > 0");
  const auto count = static_cast<std::size_t>(std::floor((b - a) / step + 1e-9)) + 1;
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i) {
    // snap to 12 significant digits so 0.5 + 7*0.1 prints as 1.2
    const double v = a + static_cast<double>(i) * step;
    grid[i] = std::stod(fmt::format("{:.12g}", v));
  }
  return grid;
}

std::string sweep_csv_header() { return "param,runs,successes,censored,p_hat,ci_low,ci_high,base_seed"; }

std::string sweep_csv_row(const SweepRow& row) {
  const EstimateResult& e = row.estimate;
  if (row.error) {
    return fmt::format("{},0,0,0,nan,nan,nan,{}", row.param, e.base_seed);
  }
  return fmt::format("{},{},{},{},{},{},{},{}", row.param, e.runs, e.successes, e.censored,
                     e.p_hat, e.ci_low, e.ci_high, e.base_seed);
}

std::string estimate_json(const EstimateResult& est, const ExperimentConfig& cfg,
                          std::optional<double> param) {
  nlohmann::ordered_json j;
  if (param) j["param"] = *param;
  j["graph"] = cfg.topology.descriptor();
  j["model"] = cfg.model.describe();
  j["radius"] = cfg.stop.max_radius;
  j["runs"] = est.runs;
  j["successes"] = est.successes;
  j["censored"] = est.censored;
  j["censored_policy"] = cfg.censored == CensoredPolicy::Exclude ? "exclude" : "failure";
  j["p_hat"] = est.p_hat;
  j["ci_low"] = est.ci_low;
  j["ci_high"] = est.ci_high;
  j["base_seed"] = est.base_seed;
  j["version"] = version_string();
  return j.dump(2);
}

BracketResult bracket_lambda_c(const ExperimentConfig& cfg, double lo, double hi,
                               double threshold, double tolerance) {
  if (!(lo < hi)) throw std::invalid_argument("bracket needs lo < hi");
  if (!(lo > 0.0)) throw std::invalid_argument("bracket needs lo > 0");
  if (!(threshold > 0.0 && threshold < 1.0)) throw std::invalid_argument("threshold must lie in (0, 1)");
  if (!(tolerance > 0.0)) throw std::invalid_argument("tolerance must be > 0");

  BracketResult result;
  auto above = [&](double lambda) {
    ExperimentConfig point = cfg;
    point.model = PassageModel::exponential(lambda);
    const EstimateResult est = estimate_survival(point);
    result.evaluations.emplace_back(lambda, est);
    return est.p_hat >= threshold;
  };
  result.lo = lo;
  result.hi = hi;
  if (above(lo) || !above(hi)) return result;
  while (result.hi - result.lo > tolerance) {
    const double mid = 0.5 * (result.lo + result.hi);
    if (above(mid)) {
      result.hi = mid;
    } else {
      result.lo = mid;
    }
  }
  result.crossed = true;
  return result;
}

}  // namespace chase
