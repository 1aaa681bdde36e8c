#include "chase/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

namespace chase::analytic {

namespace {

constexpr double kLn2 = 0.69314718055994530942;

void require_lambda(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("lambda must be finite and > 0");
}

void require_n(int n) {
  if (n < 1) throw DomainError("n must be >= 1");
}

// Leading 64 bits of x as a double, plus the binary exponent dropped.
std::pair<double, std::int64_t> top_bits(const BigInt& x) {
  const auto msb = static_cast<std::int64_t>(boost::multiprecision::msb(x));
  const std::int64_t shift = std::max<std::int64_t>(0, msb - 63);
  const BigInt head = x >> shift;
  return {head.convert_to<double>(), shift};
}

// value and natural log of num / den for positive big integers.
std::pair<double, double> ratio_value_and_log(const BigInt& num, const BigInt& den) {
  if (num == 0) return {0.0, -std::numeric_limits<double>::infinity()};
  const auto [nh, ns] = top_bits(num);
  const auto [dh, ds] = top_bits(den);
  const double mant = nh / dh;
  const std::int64_t e = ns - ds;
  const double log_value = std::log(mant) + static_cast<double>(e) * kLn2;
  const double value =
      e < -2000 ? 0.0 : std::ldexp(mant, static_cast<int>(std::max<std::int64_t>(e, -2000)));
  return {value, log_value};
}

// Numerator S and denominator b^{2n} of P(A_n) for p = a / b.
std::pair<BigInt, BigInt> reach_fraction(int n, const BigInt& a, const BigInt& b) {
  const BigInt r = b - a;
  // acc_k = sum_{j<=k} c_j a^j r^{k-j}, c_j = C(2n,n+j) - C(2n,n+j+1).
  const unsigned two_n = 2u * static_cast<unsigned>(n);
  BigInt binom = 1;  // C(2n, n+k), seeded as C(2n, n)
  for (unsigned j = 0; j < static_cast<unsigned>(n); ++j) {
    binom = binom * (two_n - j) / (j + 1);
  }
  BigInt acc = 0;
  BigInt a_pow = 1;  // a^k
  for (int k = 0; k < n; ++k) {
    const unsigned top = static_cast<unsigned>(n + k);
    const BigInt next = binom * (two_n - top) / (top + 1);
    acc = acc * r + (binom - next) * a_pow;
    a_pow *= a;
    binom = next;
  }
  // a_pow = a^n here.
  const BigInt a_n = a_pow;
  BigInt numerator = a_n * a_n + a_n * acc * r;
  BigInt denominator = boost::multiprecision::pow(b, two_n);
  return {std::move(numerator), std::move(denominator)};
}

}  // namespace

WalkParams WalkParams::from_lambda(double lambda) {
  require_lambda(lambda);
  return {lambda, lambda / (1.0 + lambda)};
}

double up_probability(double lambda) {
  require_lambda(lambda);
  return lambda / (1.0 + lambda);
}

Rational up_probability_rational(double lambda) {
  require_lambda(lambda);
  int exp2 = 0;
  const double frac = std::frexp(lambda, &exp2);
  auto mant = static_cast<std::uint64_t>(std::ldexp(frac, 53));
  int scale = 53 - exp2;  // lambda = mant / 2^scale
  while (scale > 0 && (mant & 1) == 0) {
    mant >>= 1;
    --scale;
  }
  BigInt num = mant;
  BigInt den = 1;
  if (scale > 0) {
    den <<= scale;
  } else {
    num <<= -scale;
  }
  return Rational(num, num + den);
}

double lambda_c_tree(std::int64_t d) {
  if (d < 2) throw DomainError("tree critical value needs d >= 2");
  const auto dd = static_cast<double>(d);
  return 1.0 / (2.0 * dd - 1.0 + 2.0 * std::sqrt(dd * dd - dd));
}

Rational reach_probability_rational(int n, const Rational& p) {
  require_n(n);
  if (p <= 0 || p >= 1) throw DomainError("p must lie in (0, 1)");
  auto [num, den] = reach_fraction(n, boost::multiprecision::numerator(p),
                                   boost::multiprecision::denominator(p));
  return Rational(num, den);
}

double log_reach_probability_float(int n, double lambda) {
  require_n(n);
  const double p = up_probability(lambda);
  const double log_p = std::log(p);
  const double log_q = std::log1p(-p);
  const double nn = n;
  const double lg_2n = std::lgamma(2.0 * nn + 1.0);
  std::vector<double> logs;
  logs.reserve(static_cast<std::size_t>(n) + 1);
  logs.push_back(2.0 * nn * log_p);
  for (int a = 0; a < n; ++a) {
    // C(2n,n+a) - C(2n,n+a+1) = C(2n,n+a) (2a+1)/(n+a+1)
    const double log_coef = lg_2n - std::lgamma(nn + a + 1.0) - std::lgamma(nn - a + 1.0) +
                            std::log(2.0 * a + 1.0) - std::log(nn + a + 1.0);
    logs.push_back(log_coef + (nn + a) * log_p + (nn - a) * log_q);
  }
  const double peak = *std::max_element(logs.begin(), logs.end());
  double sum = 0.0;
  for (double l : logs) sum += std::exp(l - peak);
  return peak + std::log(sum);
}

ReachProbability reach_probability_exact(int n, double lambda, bool keep_rational) {
  require_n(n);
  require_lambda(lambda);
  ReachProbability result;
  result.n = n;
  if (n <= kRationalModeLimit) {
    const Rational p = up_probability_rational(lambda);
    auto [num, den] = reach_fraction(n, boost::multiprecision::numerator(p),
                                     boost::multiprecision::denominator(p));
    const auto [value, log_value] = ratio_value_and_log(num, den);
    result.value = value;
    result.log_value = log_value;
    result.precision = Precision::ExactRational;
    if (keep_rational) result.exact = Rational(num, den);
  } else {
    result.log_value = log_reach_probability_float(n, lambda);
    result.value = std::exp(result.log_value);
    result.precision = Precision::FloatLogSum;
  }
  return result;
}

double reach_scale(int n, double lambda) {
  require_n(n);
  const double p = up_probability(lambda);
  const double nn = n;
  return std::exp(nn * std::log(4.0 * p * (1.0 - p)) - 1.5 * std::log(nn));
}

double c_lambda(double lambda) {
  require_lambda(lambda);
  if (lambda >= 1.0) throw DomainError("the C_lambda series diverges for lambda >= 1");
  // x = p / (1 - p) = lambda
  return (1.0 + lambda) / ((1.0 - lambda) * (1.0 - lambda));
}

double expected_red_level_bound(int n, std::int64_t d, double lambda) {
  require_n(n);
  if (d < 1) throw DomainError("d must be >= 1");
  const double c = c_lambda(lambda);
  const double p = up_probability(lambda);
  const double nn = n;
  return c * std::exp(nn * std::log(4.0 * static_cast<double>(d) * p * (1.0 - p)) -
                      1.5 * std::log(nn));
}

double expected_red_level_exact(int n, std::int64_t d, double lambda) {
  if (d < 1) throw DomainError("d must be >= 1");
  const ReachProbability r = reach_probability_exact(n, lambda);
  return std::exp(static_cast<double>(n) * std::log(static_cast<double>(d)) + r.log_value);
}

std::optional<int> gw_supercritical_level(std::int64_t d, double lambda, int n_cap) {
  if (d < 2) throw DomainError("d must be >= 2");
  require_lambda(lambda);
  const double log_d = std::log(static_cast<double>(d));
  for (int n = 1; n <= n_cap; ++n) {
    const ReachProbability r = reach_probability_exact(n, lambda);
    if (static_cast<double>(n) * log_d + r.log_value > 0.0) return n;
  }
  return std::nullopt;
}

double survival_prob_half_line(double lambda) {
  require_lambda(lambda);
  return std::max(0.0, 1.0 - 1.0 / lambda);
}

std::vector<double> ruin_probabilities(double p, int K) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("p must lie in (0, 1)");
  if (K < 2) throw DomainError("K must be >= 2");
  const double q = 1.0 - p;
  // Unknowns h_1..h_{K-1}: h_i - p h_{i+1} - q h_{i-1} = 0, h_0 = 1, h_K = 0.
  const int size = K - 1;
  Eigen::SparseMatrix<double> A(size, size);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(size);
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(3 * size));
  for (int row = 0; row < size; ++row) {
    entries.emplace_back(row, row, 1.0);
    if (row + 1 < size) entries.emplace_back(row, row + 1, -p);
    if (row > 0) entries.emplace_back(row, row - 1, -q);
  }
  rhs(0) = q;
  A.setFromTriplets(entries.begin(), entries.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> solver;
  solver.compute(A);
  if (solver.info() != Eigen::Success) throw DomainError("absorbing-chain factorization failed");
  const Eigen::VectorXd h = solver.solve(rhs);
  std::vector<double> out(static_cast<std::size_t>(K) + 1, 0.0);
  out[0] = 1.0;
  for (int i = 0; i < size; ++i) out[static_cast<std::size_t>(i) + 1] = h(i);
  return out;
}

double survival_prob_half_line_chain(double lambda, int K) {
  return 1.0 - ruin_probabilities(up_probability(lambda), K)[1];
}

double survival_prob_line(double lambda) {
  require_lambda(lambda);
  return lambda > 1.0 ? 1.0 - 1.0 / (2.0 * lambda - 1.0) : 0.0;
}

double survival_prob_line_chain(double lambda, int K) {
  const std::vector<double> h = ruin_probabilities(up_probability(lambda), K);
  auto ruin = [&](int r) { return r < K ? h[static_cast<std::size_t>(r)] : 0.0; };
  // Before blue takes the root, red advances on either side at rate lambda
  // each against blue's rate 1: N = R + L red steps is geometric and the
  // split is Binomial(N, 1/2). Afterwards the sides are independent chases
  // with gaps R and L.
  const double log_step = std::log(2.0 * lambda / (1.0 + 2.0 * lambda));
  const double log_stop = -std::log1p(2.0 * lambda);
  double extinct = 0.0;
  for (int total = 0; total <= 4 * K; ++total) {
    const double log_pn = log_stop + total * log_step;
    if (log_pn < -80.0) break;
    double given_n = 0.0;
    for (int r = 0; r <= total; ++r) {
      const double log_split = std::lgamma(total + 1.0) - std::lgamma(r + 1.0) -
                               std::lgamma(total - r + 1.0) - total * kLn2;
      given_n += std::exp(log_split) * ruin(r) * ruin(total - r);
    }
    extinct += std::exp(log_pn) * given_n;
  }
  return 1.0 - extinct;
}

std::int64_t slow_edge_threshold(std::int64_t n, std::int64_t m) {
  if (m < 1) throw DomainError("m must be >= 1");
  const std::int64_t num = n + 1 - m;
  if (num >= 0) return (num + m - 1) / m;
  return -((-num) / m);  // ceil of a negative ratio
}

double log_slow_edge_binomial_tail(std::int64_t n, std::int64_t m, double p) {
  if (n < 1) throw DomainError("n must be >= 1");
  if (m < 2) throw DomainError("m must be >= 2");
  if (!(p > 0.0 && p < 1.0)) throw DomainError("p must lie in (0, 1)");
  if (n + 1 < m) return -std::numeric_limits<double>::infinity();
  const std::int64_t a = std::min(slow_edge_threshold(n, m), n);
  if (a < 0) return -std::numeric_limits<double>::infinity();
  const double nn = static_cast<double>(n);
  const double log_slow = std::log1p(-p);  // X counts slow edges, P = 1 - p
  const double log_fast = std::log(p);
  std::vector<double> logs;
  logs.reserve(static_cast<std::size_t>(a) + 1);
  for (std::int64_t k = 0; k <= a; ++k) {
    const double kk = static_cast<double>(k);
    logs.push_back(std::lgamma(nn + 1.0) - std::lgamma(kk + 1.0) - std::lgamma(nn - kk + 1.0) +
                   kk * log_slow + (nn - kk) * log_fast);
  }
  const double peak = *std::max_element(logs.begin(), logs.end());
  double sum = 0.0;
  for (double l : logs) sum += std::exp(l - peak);
  return peak + std::log(sum);
}

double slow_edge_binomial_tail(std::int64_t n, std::int64_t m, double p) {
  return std::exp(log_slow_edge_binomial_tail(n, m, p));
}

double path_count_lower_bound(std::int64_t d) {
  if (d < 2) throw DomainError("path growth base must be >= 2");
  return lambda_c_tree(d);
}

std::int64_t certified_path_base(const Topology& topology, int n_max, std::uint64_t cap) {
  if (n_max < 1) throw DomainError("n_max must be >= 1");
  std::int64_t base = 1;
  for (int n = 1; n <= n_max; ++n) {
    const PathCount pc = topology.count_self_avoiding_paths(n, cap);
    if (pc.truncated) throw DomainError("path enumeration exceeded its cap");
    const double count = static_cast<double>(pc.count);
    // Smallest integer b with b^n >= count.
    auto b = static_cast<std::int64_t>(std::floor(std::pow(count, 1.0 / n)));
    b = std::max<std::int64_t>(b, 1);
    while (std::pow(static_cast<double>(b), n) < count) ++b;
    while (b > 1 && std::pow(static_cast<double>(b - 1), n) >= count) --b;
    base = std::max(base, b);
  }
  return base;
}

double oriented_pc_asymptotic(std::int64_t d) {
  const auto dd = static_cast<double>(d);
  return 1.0 / dd + 1.0 / (dd * dd * dd);
}

OrientedSurvivalParams oriented_survival_params(std::int64_t d) {
  OrientedSurvivalParams out;
  out.d = d;
  if (d <= 3) return out;
  const auto dd = static_cast<double>(d);
  out.p = 1.0 / dd + 1.0 / (dd * dd);
  out.dead_end_lhs = 1.0 - std::pow(1.0 - out.p, dd);
  out.dead_end_rhs = 1.0 - 3.0 / dd;
  out.dead_end_holds = out.dead_end_lhs < out.dead_end_rhs;
  out.pc_reference = oriented_pc_asymptotic(d);
  // d (p + eps)(1 - 3/d) < 1  <=>  eps < 1/(d - 3) - p
  const double eps_max = 1.0 / (dd - 3.0) - out.p;
  if (!out.dead_end_holds || !(eps_max > 0.0)) return out;
  out.epsilon = eps_max / 2.0;
  out.delta = 1.0 - dd * (out.p + out.epsilon) * out.dead_end_rhs;
  out.feasible = out.delta > 0.0;
  return out;
}

}  // namespace chase::analytic
