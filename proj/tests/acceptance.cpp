// Acceptance suite: one PASS/FAIL line per criterion. A criterion passes when
// its assertion holds and it finished inside its runtime budget.
//
// usage: acceptance <path to chase_escape> <scratch dir> [criterion ...]

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <map>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <sys/wait.h>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <fmt/format.h>

#include "chase/analytic.hpp"
#include "chase/montecarlo.hpp"
#include "chase/percolation.hpp"
#include "oracles.hpp"

using namespace chase;
namespace an = chase::analytic;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool ok = false;
  std::string detail;
};

std::string g_cli;
fs::path g_scratch;

unsigned workers() { return std::max(1u, std::thread::hardware_concurrency()); }

oracle::Rational exact_p(double lambda) {
  const oracle::Rational l(lambda);  // exact value of the double
  return l / (1 + l);
}

// 1. P(A_n) vs exhaustive enumeration, exact rational.
Verdict c1() {
  int checked = 0;
  for (int n = 1; n <= 10; ++n) {
    const auto counts = oracle::positive_walks_by_ups(n);
    for (double lam : {0.1, 0.5, 1.0, 2.0}) {
      const oracle::Rational p = exact_p(lam);
      const oracle::Rational q = 1 - p;
      oracle::Rational brute = 0;
      const auto steps = static_cast<unsigned>(counts.size() - 1);
      for (unsigned k = 0; k <= steps; ++k) {
        if (counts[k] != 0) brute += oracle::Rational(counts[k]) * oracle::rpow(p, k) * oracle::rpow(q, steps - k);
      }
      const auto lib = an::reach_probability_exact(n, lam, true);
      if (!lib.exact || *lib.exact != brute) {
        return {false, fmt::format("mismatch at n={} lambda={}", n, lam)};
      }
      ++checked;
    }
  }
  return {true, fmt::format("{} (n, lambda) pairs equal in exact arithmetic", checked)};
}

// 2. Tree critical value.
Verdict c2() {
  using big = boost::multiprecision::cpp_bin_float_50;
  const big ref = 3 - 2 * boost::multiprecision::sqrt(big(2));
  const double l2 = an::lambda_c_tree(2);
  const double rel = static_cast<double>(boost::multiprecision::abs((big(l2) - ref) / ref));
  double worst = 0.0;
  std::int64_t worst_d = 2;
  for (std::int64_t d = 2; d <= 1000000; ++d) {
    const double l = an::lambda_c_tree(d);
    const double err = std::fabs(4.0 * static_cast<double>(d) * l / ((1 + l) * (1 + l)) - 1.0);
    if (err > worst) {
      worst = err;
      worst_d = d;
    }
  }
  return {rel < 1e-15 && worst <= 1e-12,
          fmt::format("lambda_c(2) rel err {:.2g}; max root residual {:.2g} at d={}", rel, worst,
                      worst_d)};
}

// 3. Half-line survival.
Verdict c3() {
  ExperimentConfig cfg;
  cfg.topology = Topology::half_line();
  cfg.model = PassageModel::exponential(2.0);
  cfg.stop.max_radius = 200;
  cfg.runs = 100000;
  cfg.base_seed = 3;
  cfg.workers = workers();
  const auto est = estimate_survival(cfg);
  const double chain = 1.0 - oracle::ruin(2.0 / 3.0, 1, 100000);
  return {est.p_hat >= 0.49 && est.p_hat <= 0.51,
          fmt::format("p_hat {:.4f} CI [{:.4f}, {:.4f}]; gambler's ruin {:.4f}", est.p_hat,
                      est.ci_low, est.ci_high, chain)};
}

// 4. Monte Carlo reach frequencies vs exact P(A_n).
Verdict c4() {
  ExperimentConfig cfg;
  cfg.topology = Topology::half_line();
  cfg.model = PassageModel::exponential(0.5);
  cfg.stop.max_radius = 8;
  cfg.runs = 100000;
  cfg.base_seed = 4;
  cfg.workers = workers();
  const auto outcomes = collect_outcomes(cfg);
  double worst = 0.0;
  bool ok = true;
  for (int n = 1; n <= 8; ++n) {
    std::uint64_t hits = 0;
    for (const auto& o : outcomes) hits += o.max_red_radius >= static_cast<std::uint64_t>(n);
    const double freq = static_cast<double>(hits) / static_cast<double>(outcomes.size());
    const double exact = an::reach_probability_exact(n, 0.5).value;
    const double se = std::sqrt(exact * (1 - exact) / static_cast<double>(outcomes.size()));
    worst = std::max(worst, std::fabs(freq - exact) / se);
    ok = ok && std::fabs(freq - exact) <= 3 * se;
  }
  return {ok, fmt::format("max |freq - P(A_n)| = {:.2f} SE over n = 1..8", worst)};
}

// 5. Tree phase transition.
Verdict c5() {
  ExperimentConfig cfg;
  cfg.topology = Topology::tree(2);
  cfg.stop.max_radius = 60;
  cfg.runs = 10000;
  cfg.base_seed = 5;
  cfg.workers = workers();
  cfg.model = PassageModel::exponential(0.35);
  const auto sup = estimate_survival(cfg);
  cfg.model = PassageModel::exponential(0.08);
  const auto sub = estimate_survival(cfg);
  return {sup.ci_low > 0.01 && sub.ci_high < 0.005,
          fmt::format("lambda=0.35: p_hat {:.4f} ci_low {:.4f}; lambda=0.08: p_hat {:.4f} "
                      "ci_high {:.5f} (censored {}+{})",
                      sup.p_hat, sup.ci_low, sub.p_hat, sub.ci_high, sup.censored, sub.censored)};
}

// 6. Ladder bracketing.
Verdict c6() {
  ExperimentConfig cfg;
  cfg.topology = Topology::ladder();
  cfg.stop.max_radius = 200;
  cfg.runs = 2000;
  cfg.base_seed = 6;
  cfg.workers = workers();
  // Threshold: the critical (lambda = 1) path's chance of reaching the same
  // distance, fixed before looking at any ladder estimate.
  const double threshold = an::reach_probability_exact(200, 1.0).value;
  const auto r = bracket_lambda_c(cfg, 0.5, 1.5, threshold, 0.2);
  std::string evals;
  for (const auto& [lam, est] : r.evaluations) evals += fmt::format(" {}:{:.4f}", lam, est.p_hat);
  return {r.crossed && r.lo <= 1.0 && 1.0 <= r.hi && r.hi - r.lo <= 0.2,
          fmt::format("threshold {:.4f}; interval [{}, {}]; evaluations{}", threshold, r.lo, r.hi,
                      evals)};
}

// 7. P(A_n)/a_n bounded in a fixed positive interval.
Verdict c7() {
  bool ok = true;
  std::string detail;
  for (double lam : {0.3, 0.5, 0.8}) {
    double lo = INFINITY, hi = 0.0;
    for (int n = 1; n <= 200; ++n) {
      const double ratio = std::exp(an::reach_probability_exact(n, lam).log_value -
                                    std::log(an::reach_scale(n, lam)));
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    // explicit interval: [1/4, C_lambda]
    const double c = an::c_lambda(lam);
    ok = ok && lo >= 0.25 && hi <= c;
    detail += fmt::format("lambda={}: [{:.4f}, {:.4f}] within [0.25, {:.4f}]; ", lam, lo, hi, c);
  }
  return {ok, detail};
}

// 8. Slow-edge binomial tail bound, exact.
Verdict c8() {
  const oracle::Rational p(1, 20), bound_base(7, 100);
  std::map<std::pair<int, long>, oracle::Rational> cache;
  std::uint64_t points = 0;
  double worst_log_margin = -INFINITY, worst_lib_err = 0.0;
  using big = boost::multiprecision::cpp_bin_float_50;
  for (int n = 200; n <= 400; ++n) {
    const oracle::Rational bound = oracle::rpow(bound_base, static_cast<unsigned>(n));
    for (int m = 200; m <= n; ++m) {
      const long a = (n + 1 - m + m - 1) / m;  // ceil((n+1-m)/m)
      auto it = cache.find({n, a});
      if (it == cache.end()) {
        it = cache.emplace(std::make_pair(n, a), oracle::binomial_cdf(n, a, 1 - p)).first;
      }
      const oracle::Rational& tail = it->second;
      ++points;
      if (tail > bound) return {false, fmt::format("bound fails at n={} m={}", n, m)};
      const big lt = boost::multiprecision::log(big(numerator(tail))) -
                     boost::multiprecision::log(big(denominator(tail)));
      const big lb = n * boost::multiprecision::log(big(7) / 100);
      worst_log_margin = std::max(worst_log_margin, static_cast<double>(lt - lb));
      const double lib = an::log_slow_edge_binomial_tail(n, m, 0.05);
      worst_lib_err = std::max(worst_lib_err, std::fabs(lib - static_cast<double>(lt)) /
                                                  std::fabs(static_cast<double>(lt)));
    }
  }
  return {worst_lib_err < 1e-9,
          fmt::format("{} grid points; max log(tail) - n log(p+eps) = {:.1f}; library rel err {:.2g}",
                      points, worst_log_margin, worst_lib_err)};
}

// 9. Oriented-lattice structure.
Verdict c9() {
  const auto params = an::oriented_survival_params(10);
  if (!params.feasible) return {false, "d=10 parameters infeasible"};
  const int L = 40;
  const std::uint64_t runs = 10000;
  const auto rows = limit_probe(10, params.p, {2, 4, 8, 16, 32}, L, runs, 9, workers());
  std::uint64_t violations = 0;
  for (const auto& r : rows) violations += r.inclusion_violations;
  const double slow = rows.front().slow_first_hat;
  const double se_b = std::sqrt(params.p * (1 - params.p) / static_cast<double>(runs));
  const bool b_ok = std::fabs(slow - (1 - params.p)) <= 3 * se_b;
  int inversions = 0;
  bool noise_ok = true;
  std::string gaps;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    gaps += fmt::format(" m={}:{:.4f}", rows[i].m, rows[i].gap);
    if (i == 0 || rows[i].gap <= rows[i - 1].gap) continue;
    ++inversions;
    const double s = rows[i].survival_hat;
    noise_ok = noise_ok && rows[i].gap - rows[i - 1].gap <=
                               3 * std::sqrt(s * (1 - s) / static_cast<double>(runs));
  }
  return {violations == 0 && b_ok && inversions <= 1 && noise_ok,
          fmt::format("d=10 p={} L={}: (a) inclusion violations {}; (b) P(B) {:.4f} vs {:.4f} "
                      "(3 SE {:.4f}); (c) gaps{} with {} inversion(s)",
                      params.p, L, violations, slow, 1 - params.p, 3 * se_b, gaps, inversions)};
}

int sh(const std::string& args) {
  const std::string cmd = g_cli + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// 10. Byte-identical CLI outputs.
Verdict c10() {
  const fs::path dir = g_scratch / "determinism";
  fs::create_directories(dir);
  auto f = [&](const std::string& name) { return (dir / name).string(); };
  std::vector<std::string> mismatches;
  auto same = [&](const std::string& a, const std::string& b) {
    const std::string x = slurp(a), y = slurp(b);
    if (x.empty() || x != y) mismatches.push_back(fs::path(b).filename().string());
  };
  for (int i : {1, 2}) {
    if (sh(fmt::format("simulate --graph z2 --lambda 0.9 --radius 40 --seed 77 --trace {} --out {}",
                       f(fmt::format("trace{}.csv", i)), f(fmt::format("sim{}.json", i)))) != 0) {
      return {false, "simulate failed"};
    }
    if (sh(fmt::format("render --graph z2 --lambda 0.75 --seed 77 --events 200000 --half-width 60 --out {}",
                       f(fmt::format("snap{}.ppm", i)))) != 0) {
      return {false, "render failed"};
    }
  }
  same(f("trace1.csv"), f("trace2.csv"));
  same(f("sim1.json"), f("sim2.json"));
  same(f("snap1.ppm"), f("snap2.ppm"));
  for (int w : {1, 4, 16}) {
    if (sh(fmt::format("sweep --graph ladder --lambda-grid 0.8:1.2:0.2 --runs 400 --radius 40 "
                       "--seed 10 --workers {} --out {} --json {}",
                       w, f(fmt::format("sweep{}.csv", w)), f(fmt::format("sweep{}.json", w)))) != 0) {
      return {false, "sweep failed"};
    }
    if (sh(fmt::format("percolation --d 6 --p 0.25 --m-grid 2,8 --L 12 --runs 400 --seed 10 "
                       "--workers {} --out {}",
                       w, f(fmt::format("perc{}.csv", w)))) != 0) {
      return {false, "percolation failed"};
    }
  }
  for (int w : {4, 16}) {
    same(f("sweep1.csv"), f(fmt::format("sweep{}.csv", w)));
    same(f("sweep1.json"), f(fmt::format("sweep{}.json", w)));
    same(f("perc1.csv"), f(fmt::format("perc{}.csv", w)));
  }
  std::string bad;
  for (const auto& m : mismatches) bad += " " + m;
  return {mismatches.empty(), mismatches.empty() ? "simulate, render, sweep and percolation "
                                                   "outputs identical (workers 1, 4, 16)"
                                                 : "differences:" + bad};
}

// 11. Snapshot images for human inspection. Each shows a run that survives
// to the image border: the seed is the first one >= 1 whose run reaches
// distance 100.
Verdict c11() {
  const fs::path dir = g_scratch / "figures";
  fs::create_directories(dir);
  std::string detail;
  for (double lam : {1.0, 0.75, 0.5}) {
    StoppingRule stop;
    stop.max_radius = 100;
    stop.max_events = 1000000;
    std::uint64_t seed = 1;
    while (simulate(Topology::lattice(2), PassageModel::exponential(lam), stop, seed).status !=
           OutcomeStatus::RedReachedRadius) {
      if (++seed > 5000) return {false, fmt::format("no surviving seed at lambda={}", lam)};
    }
    const fs::path out = dir / fmt::format("z2_lambda_{}.ppm", lam);
    if (sh(fmt::format("render --graph z2 --lambda {} --seed {} --events 1000000 --half-width 100 --out {}",
                       lam, seed, out.string())) != 0) {
      return {false, "render failed"};
    }
    const std::string bytes = slurp(out);
    std::uint64_t red = 0, blue = 0;
    for (std::size_t i = bytes.size() - 201 * 201 * 3; i + 2 < bytes.size(); i += 3) {
      red += bytes[i] == '\xdc';
      blue += bytes[i] == '\x26';
    }
    detail += fmt::format("{} (seed {}): red {} blue {}; ", out.filename().string(), seed, red, blue);
  }
  return {true, detail + "qualitative comparison is by eye"};
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::cerr << "usage: acceptance <chase_escape> <scratch dir> [criterion ...]\n";
    return 2;
  }
  g_cli = argv[1];
  g_scratch = argv[2];
  fs::create_directories(g_scratch);
  std::set<int> only;
  for (int i = 3; i < argc; ++i) only.insert(std::atoi(argv[i]));

  const std::vector<Criterion> criteria{
      {1, "reach probability = exhaustive enumeration", 10, c1},
      {2, "tree critical value", 1, c2},
      {3, "half-line survival at lambda=2", 120, c3},
      {4, "Monte Carlo vs exact reach probabilities", 120, c4},
      {5, "binary-tree phase transition", 300, c5},
      {6, "ladder critical value bracketing", 600, c6},
      {7, "reach ratio bounds", 30, c7},
      {8, "slow-edge binomial tail bound", 30, c8},
      {9, "oriented-lattice structure", 900, c9},
      {10, "determinism across invocations and workers", 60, c10},
      {11, "figure reproduction (qualitative)", 600, c11},
  };
  std::cout << fmt::format("acceptance: {} hardware thread(s)\n", workers()) << std::flush;
  int failures = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_budget = secs <= c.budget_s;
    const bool pass = v.ok && in_budget;
    failures += !pass;
    std::cout << fmt::format("[{}] criterion {:>2}: {} -- {} ({:.1f} s, budget {:.0f} s{})\n",
                             pass ? "PASS" : "FAIL", c.id, c.name, v.detail, secs, c.budget_s,
                             in_budget ? "" : ", EXCEEDED")
              << std::flush;
  }
  return failures == 0 ? 0 : 1;
}
