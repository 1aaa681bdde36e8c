#include "chase/verify.hpp"

#include <bit>
#include <chrono>
#include <cmath>
#include <functional>

#include <fmt/format.h>

#include "chase/analytic.hpp"
#include "chase/engine.hpp"
#include "chase/montecarlo.hpp"
#include "chase/percolation.hpp"

namespace chase {

namespace {

namespace an = analytic;

struct Verdict {
  bool passed;
  std::string detail;
};

// Exhaustive walk enumeration: count[k] = number of length-2n +/-1 paths from
// 1 with k up-steps that never touch 0.
std::vector<an::BigInt> surviving_paths_by_ups(int n) {
  const int steps = 2 * n;
  std::vector<an::BigInt> count(static_cast<std::size_t>(steps) + 1, 0);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << steps); ++mask) {
    int pos = 1;
    bool alive = true;
    for (int s = 0; s < steps && alive; ++s) {
      pos += (mask >> s) & 1 ? 1 : -1;
      alive = pos >= 1;
    }
    if (alive) count[static_cast<std::size_t>(std::popcount(mask))] += 1;
  }
  return count;
}

Verdict check_tree_root() {
  const double d2 = an::lambda_c_tree(2);
  if (std::abs(d2 - (3.0 - 2.0 * std::sqrt(2.0))) > 1e-15) {
    return {false, fmt::format("lambda_c(2) = {:.17g}", d2)};
  }
  double worst = 0.0;
  std::int64_t worst_d = 2;
  for (std::int64_t d = 2; d <= 1'000'000; ++d) {
    const double lam = an::lambda_c_tree(d);
    const double lhs = 4.0 * static_cast<double>(d) * lam / ((1.0 + lam) * (1.0 + lam));
    const double err = std::abs(lhs - 1.0);
    if (err > worst) {
      worst = err;
      worst_d = d;
    }
    // The other root of lambda^2 + (2 - 4d) lambda + 1 = 0 is 1 / lambda.
    if (!(lam < 1.0 / lam)) return {false, fmt::format("not the smaller root at d={}", d)};
  }
  return {worst <= 1e-12, fmt::format("max |4d l/(1+l)^2 - 1| = {:.3g} at d={}", worst, worst_d)};
}

an::Rational rational_pow(const an::Rational& base, std::size_t e) {
  an::Rational out = 1;
  for (std::size_t i = 0; i < e; ++i) out *= base;
  return out;
}

Verdict check_reach_enumeration(int n_max) {
  const std::vector<an::Rational> ps{an::Rational(1, 11), an::Rational(1, 3), an::Rational(1, 2),
                                     an::Rational(2, 3)};
  for (int n = 1; n <= n_max; ++n) {
    const auto counts = surviving_paths_by_ups(n);
    for (const an::Rational& p : ps) {
      const an::Rational q = 1 - p;
      an::Rational brute = 0;
      for (std::size_t k = 0; k < counts.size(); ++k) {
        if (counts[k] == 0) continue;
        brute += an::Rational(counts[k]) * rational_pow(p, k) * rational_pow(q, counts.size() - 1 - k);
      }
      if (brute != an::reach_probability_rational(n, p)) {
        return {false, fmt::format("mismatch at n={} p={}", n, p.str())};
      }
    }
  }
  return {true, fmt::format("exact match for n <= {} and 4 rates", n_max)};
}

Verdict check_reach_monotone() {
  const std::vector<double> lambdas{0.1, 0.3, 0.5, 0.8, 1.0, 1.5, 2.0};
  for (double lam : lambdas) {
    double prev = 1.0;
    for (int n = 1; n <= 60; ++n) {
      const double v = an::reach_probability_exact(n, lam).value;
      if (v > prev) return {false, fmt::format("increase in n at lambda={} n={}", lam, n)};
      prev = v;
    }
  }
  for (int n = 1; n <= 60; n += 7) {
    double prev = 0.0;
    for (double lam : lambdas) {
      const double v = an::reach_probability_exact(n, lam).value;
      if (v < prev) return {false, fmt::format("decrease in lambda at n={} lambda={}", n, lam)};
      prev = v;
    }
  }
  return {true, "nonincreasing in n, nondecreasing in lambda"};
}

Verdict check_reach_scale_bounds() {
  // Lower constant: the Catalan term alone, with C_n n^{3/2} / 4^n >= 1/4.
  // Upper constant: C_lambda / sqrt(pi) plus the largest n^{3/2} (p / 4q)^n.
  for (double lam : {0.3, 0.5, 0.8}) {
    const double p = an::up_probability(lam);
    double sup_extra = 0.0;
    for (int n = 1; n <= 200; ++n) {
      sup_extra = std::max(sup_extra, std::pow(n, 1.5) * std::pow(p / (4.0 * (1.0 - p)), n));
    }
    const double lower = 0.25;
    const double upper = an::c_lambda(lam) / std::sqrt(M_PI) + sup_extra;
    for (int n = 1; n <= 200; ++n) {
      const double ratio = an::reach_probability_exact(n, lam).value / an::reach_scale(n, lam);
      if (!(ratio >= lower && ratio <= upper)) {
        return {false, fmt::format("ratio {} outside [{}, {}] at lambda={} n={}", ratio, lower,
                                   upper, lam, n)};
      }
    }
  }
  return {true, "P(A_n)/a_n within [1/4, C/sqrt(pi) + tail] for n in [1,200]"};
}

Verdict check_c_lambda() {
  for (double lam : {1.0 / 3.0, 0.1, 0.5, 0.9}) {
    double partial = 0.0;
    for (int a = 0; a < 5000; ++a) partial += (2.0 * a + 1.0) * std::pow(lam, a);
    const double closed = an::c_lambda(lam);
    if (std::abs(partial - closed) > 1e-9 * closed) {
      return {false, fmt::format("series {} vs closed form {} at lambda={}", partial, closed, lam)};
    }
  }
  return {std::abs(an::c_lambda(1.0 / 3.0) - 3.0) < 1e-12, "closed form matches partial sums"};
}

Verdict check_subcritical_summable() {
  // At the critical rate the bound terms are C / n^{3/2}; the tail past N is
  // at most 2 C / sqrt(N - 1).
  const double lam = an::lambda_c_tree(2);
  const double c = an::c_lambda(lam);
  double sum = 0.0;
  for (int n = 1; n <= 10000; ++n) {
    const double term = an::expected_red_level_bound(n, 2, lam);
    if (term > c * std::pow(n, -1.5) * (1.0 + 1e-9)) {
      return {false, fmt::format("term {} exceeds C n^-1.5 at n={}", term, n)};
    }
    sum += term;
  }
  const double tail = 2.0 * c / std::sqrt(9999.0);
  const double sub = 2.0 * 4.0 * (0.1 / 1.1) * (1.0 / 1.1);
  const bool sub_ok = std::abs(sub - 0.66115702479) < 1e-9 &&
                      std::abs(4.0 * 2 * an::up_probability(0.1) * (1 - an::up_probability(0.1)) - sub) < 1e-12;
  return {sub_ok, fmt::format("partial sum {:.6f}, tail bound {:.3g}; 4dp(1-p) at d=2, lambda=0.1 is {:.6f}",
                              sum, tail, sub)};
}

Verdict check_gw_levels() {
  for (std::int64_t d : {2, 3, 5}) {
    const auto level = an::gw_supercritical_level(d, 1.5);
    if (!level || *level != 1) return {false, fmt::format("lambda>1 should give N=1 at d={}", d)};
  }
  const auto at03 = an::gw_supercritical_level(2, 0.3);
  if (!at03) return {false, "no supercritical level at d=2, lambda=0.3"};
  const double mean = an::expected_red_level_exact(*at03, 2, 0.3);
  if (!(mean > 1.0)) return {false, "level mean not above 1"};
  const auto near = an::gw_supercritical_level(2, 0.1716, 500);
  if (near) return {false, fmt::format("unexpected level {} at lambda=0.1716", *near)};
  return {true, fmt::format("d=2, lambda=0.3 -> N={} (mean {:.4f}); none up to 500 at 0.1716",
                            *at03, mean)};
}

Verdict check_half_line_chain() {
  double worst = 0.0;
  for (double lam : {1.1, 1.5, 2.0, 4.0}) {
    worst = std::max(worst, std::abs(an::survival_prob_half_line(lam) -
                                     an::survival_prob_half_line_chain(lam, 1000)));
  }
  return {worst < 1e-9, fmt::format("max |closed - chain(K=1000)| = {:.3g}", worst)};
}

Verdict check_line_chain() {
  double worst = 0.0;
  for (double lam : {1.5, 2.0, 3.0}) {
    worst = std::max(worst, std::abs(an::survival_prob_line(lam) -
                                     an::survival_prob_line_chain(lam, 400)));
  }
  return {worst < 1e-7, fmt::format("max |closed - chain| = {:.3g}", worst)};
}

Verdict check_slow_edge_tail() {
  const double example = an::slow_edge_binomial_tail(10, 5, 0.2);
  if (std::abs(example - 7.7926e-5) > 1e-8) {
    return {false, fmt::format("n=10, m=5, p=0.2 gave {}", example)};
  }
  const double p = 0.05, eps = 0.02;
  double worst = -INFINITY;
  for (int n = 200; n <= 400; ++n) {
    for (int m = 200; m <= n; ++m) {
      const double margin = an::log_slow_edge_binomial_tail(n, m, p) - n * std::log(p + eps);
      worst = std::max(worst, margin);
    }
  }
  return {worst <= 0.0, fmt::format("max log(tail) - n log(p+eps) = {:.4g}", worst)};
}

Verdict check_path_counts() {
  for (int d : {2, 3}) {
    const Topology t = Topology::tree(d);
    for (int n = 1; n <= 8; ++n) {
      const PathCount pc = t.count_self_avoiding_paths(n, 1u << 20);
      if (pc.truncated || pc.count != static_cast<std::uint64_t>(std::pow(d, n))) {
        return {false, fmt::format("tree d={} n={} count {}", d, n, pc.count)};
      }
    }
  }
  const auto ladder = an::certified_path_base(Topology::ladder(), 12, 1u << 24);
  const auto z2 = an::certified_path_base(Topology::lattice(2), 10, 1u << 24);
  const bool ok = ladder == 3 && z2 == 4 &&
                  std::abs(an::path_count_lower_bound(3) - (5.0 - 2.0 * std::sqrt(6.0))) < 1e-15;
  return {ok, fmt::format("tree counts d^n; ladder base {}, Z^2 base {}; bounds {:.6f}, {:.6f}",
                          ladder, z2, an::path_count_lower_bound(ladder),
                          an::path_count_lower_bound(z2))};
}

Verdict check_oriented_params() {
  const auto small = an::oriented_survival_params(4);
  const auto big = an::oriented_survival_params(10);
  const bool ok = !small.feasible && big.feasible &&
                  10.0 * (big.p + big.epsilon) * (1.0 - 0.3) < 1.0;
  return {ok, fmt::format("d=4 feasible={}, d=10 feasible={} (p={}, eps={:.4g}, delta={:.4g})",
                          small.feasible, big.feasible, big.p, big.epsilon, big.delta)};
}

Verdict check_half_line_mc(bool fast) {
  ExperimentConfig cfg;
  cfg.topology = Topology::half_line();
  cfg.model = PassageModel::exponential(2.0);
  cfg.stop.max_radius = 200;
  cfg.runs = fast ? 20000 : 100000;
  cfg.base_seed = 0xC0FFEE;
  const EstimateResult est = estimate_survival(cfg);
  return {est.ci_low <= 0.5 && 0.5 <= est.ci_high,
          fmt::format("p_hat {:.4f} CI [{:.4f}, {:.4f}] vs 1/2", est.p_hat, est.ci_low, est.ci_high)};
}

Verdict check_gap_walk(bool fast) {
  const double lam = 0.7;
  const double p = an::up_probability(lam);
  const Topology t = Topology::half_line();
  const PassageModel model = PassageModel::exponential(lam);
  StoppingRule stop;
  stop.max_radius = 50;
  std::uint64_t ups = 0, steps = 0;
  const std::uint64_t runs = fast ? 20000 : 100000;
  for (std::uint64_t i = 0; i < runs; ++i) {
    Simulation sim(t, model, stop, run_seed(77, i));
    sim.set_trace([&](const TraceRecord& r) {
      if (!r.applied) return;
      ++steps;
      if (r.color == SpreadColor::Red) ++ups;
    });
    sim.run();
  }
  const double freq = static_cast<double>(ups) / static_cast<double>(steps);
  const double se = std::sqrt(p * (1 - p) / static_cast<double>(steps));
  return {std::abs(freq - p) <= 3 * se,
          fmt::format("up-step frequency {:.5f} vs p={:.5f} (3 SE = {:.5f})", freq, p, 3 * se)};
}

Verdict check_tree_subcritical(bool fast) {
  ExperimentConfig cfg;
  cfg.topology = Topology::tree(2);
  cfg.model = PassageModel::exponential(0.05);
  cfg.stop.max_radius = 50;
  cfg.runs = fast ? 2000 : 10000;
  cfg.base_seed = 5;
  const EstimateResult est = estimate_survival(cfg);
  return {est.successes == 0 && est.censored == 0,
          fmt::format("{} of {} runs reached radius 50", est.successes, est.runs)};
}

}  // namespace

std::vector<CheckResult> run_verification(bool fast) {
  struct Entry {
    std::string name;
    std::string reference;
    std::function<Verdict()> run;
  };
  const std::vector<Entry> entries{
      {"tree-critical-root", "tree critical rate is the smaller root of 4d l/(1+l)^2 = 1",
       check_tree_root},
      {"reach-exact-vs-enumeration", "reflection-principle sum for P(A_n) vs all 2^{2n} walks",
       [fast] { return check_reach_enumeration(fast ? 8 : 10); }},
      {"reach-monotone", "P(A_n) monotone in n and lambda", check_reach_monotone},
      {"reach-scale-bounds", "c a_n <= P(A_n) <= C_lambda a_n", check_reach_scale_bounds},
      {"c-lambda-series", "C_lambda = sum (2a+1) lambda^a closed form", check_c_lambda},
      {"tree-subcritical-summable", "expected red count per level summable at criticality",
       check_subcritical_summable},
      {"gw-supercritical-level", "embedded Galton-Watson mean d^N P(A_N) > 1", check_gw_levels},
      {"half-line-survival-chain", "half-line survival 1 - 1/lambda vs absorbing chain",
       check_half_line_chain},
      {"line-survival-chain", "two-sided line survival vs absorbing chain", check_line_chain},
      {"slow-edge-binomial-tail", "binomial tail <= (p + eps)^n on the grid", check_slow_edge_tail},
      {"path-count-bases", "self-avoiding path counts and tree lower bounds", check_path_counts},
      {"oriented-parameters", "oriented-lattice parameter feasibility", check_oriented_params},
      {"half-line-monte-carlo", "simulated half-line survival at lambda=2",
       [fast] { return check_half_line_mc(fast); }},
      {"gap-walk-law", "red-blue gap is a p-biased walk", [fast] { return check_gap_walk(fast); }},
      {"tree-subcritical-monte-carlo", "red dies out on the binary tree at lambda=0.05",
       [fast] { return check_tree_subcritical(fast); }},
  };

  std::vector<CheckResult> results;
  for (const Entry& e : entries) {
    CheckResult r;
    r.name = e.name;
    r.reference = e.reference;
    const auto start = std::chrono::steady_clock::now();
    try {
      const Verdict v = e.run();
      r.passed = v.passed;
      r.detail = v.detail;
    } catch (const std::exception& ex) {
      r.passed = false;
      r.detail = std::string("exception: ") + ex.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace chase
