#pragma once

// Closed forms and exact combinatorial oracles for chase-escape on paths,
// trees and oriented lattices.
//
// Conventions: lambda is the red rate (blue has rate 1) and
// p = lambda / (1 + lambda) is the probability that red's exponential clock
// beats blue's. A_n is the event that red ever reaches distance n on a path.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "chase/topology.hpp"

namespace chase::analytic {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct WalkParams {
  double lambda = 1.0;
  double p = 0.5;

  static WalkParams from_lambda(double lambda);
};

/// lambda / (1 + lambda).
double up_probability(double lambda);

/// Exact rational value of p for a double lambda.
Rational up_probability_rational(double lambda);

/// Critical red rate on the d-ary tree: 2d - 1 - 2 sqrt(d^2 - d), the smaller
/// root of 4 d lambda / (1 + lambda)^2 = 1. Evaluated in the cancellation-free
/// form 1 / (2d - 1 + 2 sqrt(d^2 - d)).
double lambda_c_tree(std::int64_t d);

enum class Precision { ExactRational, FloatLogSum };

struct ReachProbability {
  int n = 0;
  double value = 0.0;
  double log_value = 0.0;
  Precision precision = Precision::ExactRational;
  std::optional<Rational> exact;
};

/// Largest n evaluated in exact rational arithmetic; beyond this the sum is
/// evaluated in floating point (all terms positive, no cancellation).
inline constexpr int kRationalModeLimit = 300;

/// P(A_n) = p^{2n} + sum_{a=0}^{n-1} [C(2n,n+a) - C(2n,n+a+1)] p^{n+a} (1-p)^{n-a},
/// the probability that the p-biased walk from 1 stays >= 1 for 2n steps.
ReachProbability reach_probability_exact(int n, double lambda, bool keep_rational = false);

/// Same sum for an exact rational p in (0, 1), any n >= 1.
Rational reach_probability_rational(int n, const Rational& p);

/// The float path, in log space.
double log_reach_probability_float(int n, double lambda);

/// a_n = [4p(1-p)]^n / n^{3/2}.
double reach_scale(int n, double lambda);

/// sum_{a>=0} (2a+1) x^a with x = p/(1-p) = lambda, i.e. (1+x)/(1-x)^2.
/// Requires lambda < 1.
double c_lambda(double lambda);

/// C_lambda d^n (4p(1-p))^n / n^{3/2}; requires lambda < 1.
double expected_red_level_bound(int n, std::int64_t d, double lambda);

/// d^n P(A_n): exact expected number of depth-n tree vertices ever red.
double expected_red_level_exact(int n, std::int64_t d, double lambda);

/// Smallest N <= n_cap with d^N P(A_N) > 1, if any.
std::optional<int> gw_supercritical_level(std::int64_t d, double lambda, int n_cap = 500);

/// Probability that red survives on the half-line: max(0, 1 - 1/lambda).
double survival_prob_half_line(double lambda);

/// Absorbing chain for the p-biased walk on {0..K}: returns h with
/// h[i] = P(hit 0 before K | start at i). Solved as a sparse linear system.
std::vector<double> ruin_probabilities(double p, int K);

/// 1 - h[1] from ruin_probabilities: the half-line survival probability with
/// escape beyond K counted as survival.
double survival_prob_half_line_chain(double lambda, int K);

/// Survival on the two-sided line when the only blue source is the aux vertex
/// at the root: red grows both ways until blue takes the root, after which the
/// two sides are independent half-line chases. Closed form 1 - 1/(2 lambda - 1)
/// for lambda > 1, else 0.
double survival_prob_line(double lambda);

/// The same quantity assembled from the truncated absorbing chain.
double survival_prob_line_chain(double lambda, int K);

/// ceil((n + 1 - m) / m): the most slow (time m) blue edges that still let
/// blue cover distance n + 1 by time n + 1 after a slow first edge.
std::int64_t slow_edge_threshold(std::int64_t n, std::int64_t m);

/// Exact P(X <= slow_edge_threshold(n, m)) for X ~ Binomial(n, 1 - p); an
/// upper bound on the probability that blue, delayed by m on its first edge,
/// covers n + 1 sites by time n + 1. Zero when n + 1 < m.
double slow_edge_binomial_tail(std::int64_t n, std::int64_t m, double p);

/// Natural log of slow_edge_binomial_tail; -inf when the tail is zero.
double log_slow_edge_binomial_tail(std::int64_t n, std::int64_t m, double p);

/// If a graph has at most d^n self-avoiding length-n paths from the root, its
/// critical rate is at least lambda_c_tree(d). Requires d >= 2.
double path_count_lower_bound(std::int64_t d);

/// Smallest integer d with count_self_avoiding_paths(n) <= d^n for every
/// n in [1, n_max]. Throws if an enumeration hits `cap`.
std::int64_t certified_path_base(const Topology& topology, int n_max, std::uint64_t cap);

/// Parameter choice for the oriented-lattice survival result:
/// p = 1/d + 1/d^2, the dead-end condition 1 - (1-p)^d < 1 - 3/d, and an
/// epsilon with d (p + epsilon)(1 - 3/d) = 1 - delta, delta > 0.
struct OrientedSurvivalParams {
  std::int64_t d = 0;
  double p = 0.0;
  double dead_end_lhs = 0.0;  ///< 1 - (1-p)^d
  double dead_end_rhs = 0.0;  ///< 1 - 3/d
  bool dead_end_holds = false;
  bool feasible = false;
  double epsilon = 0.0;
  double delta = 0.0;
  double pc_reference = 0.0;  ///< asymptotic 1/d + 1/d^3, reference only
};

OrientedSurvivalParams oriented_survival_params(std::int64_t d);

/// 1/d + 1/d^3, the leading terms of the oriented bond percolation threshold.
double oriented_pc_asymptotic(std::int64_t d);

}  // namespace chase::analytic
