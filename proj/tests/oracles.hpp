#pragma once

// Independent reference computations used by the tests. Nothing here calls
// into the library's analytic code.

#include <cmath>
#include <cstdint>
#include <set>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace oracle {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline Rational rpow(const Rational& b, unsigned e) {
  Rational r = 1;
  for (unsigned i = 0; i < e; ++i) r *= b;
  return r;
}

// counts[k] = number of +-1 step sequences of length 2n with k up-steps that
// start at 1 and never touch 0.
inline std::vector<std::uint64_t> positive_walks_by_ups(int n) {
  const unsigned steps = 2u * static_cast<unsigned>(n);
  std::vector<std::uint64_t> counts(steps + 1, 0);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << steps); ++mask) {
    int h = 1;
    unsigned ups = 0;
    bool ok = true;
    for (unsigned s = 0; s < steps; ++s) {
      if ((mask >> s) & 1) {
        ++h;
        ++ups;
      } else if (--h == 0) {
        ok = false;
        break;
      }
    }
    if (ok) ++counts[ups];
  }
  return counts;
}

/// P(A_n) by exhaustive enumeration of all 2^{2n} gap walks.
inline Rational enumerate_reach(int n, const Rational& p) {
  const auto counts = positive_walks_by_ups(n);
  const Rational q = 1 - p;
  const auto steps = static_cast<unsigned>(counts.size() - 1);
  Rational total = 0;
  for (unsigned k = 0; k <= steps; ++k) {
    if (counts[k] != 0) total += Rational(counts[k]) * rpow(p, k) * rpow(q, steps - k);
  }
  return total;
}

/// P(A_n) by dynamic programming over the half-line race itself: state is
/// (red steps taken, red-blue gap); red steps w.p. p, blue w.p. 1-p, red is
/// dead when the gap reaches 0.
inline Rational race_reach(int n, const Rational& p) {
  const Rational q = 1 - p;
  // mass[g] for the current number of red steps r
  std::vector<Rational> mass(static_cast<std::size_t>(n) + 2, 0);
  mass[1] = 1;
  for (int r = 0; r < n; ++r) {
    // Before red's next step, blue may take any number of steps. From gap g,
    // red steps next after j blue steps with prob q^j p, for j < g.
    std::vector<Rational> next(mass.size() + 1, 0);
    for (std::size_t g = 1; g < mass.size(); ++g) {
      if (mass[g] == 0) continue;
      Rational qj = 1;
      for (std::size_t j = 0; j < g; ++j) {
        next[g - j + 1] += mass[g] * qj * p;
        qj *= q;
      }
    }
    mass.swap(next);
  }
  Rational total = 0;
  for (const Rational& m : mass) total += m;
  return total;
}

/// Self-avoiding paths of n edges from (0,0) on a planar graph given by a
/// neighbor function, never visiting `forbidden`.
template <class Neighbors>
std::uint64_t count_paths(int n, Neighbors neighbors, std::pair<long, long> forbidden) {
  std::set<std::pair<long, long>> seen{{0, 0}};
  std::uint64_t count = 0;
  auto dfs = [&](auto&& self, std::pair<long, long> at, int left) -> void {
    if (left == 0) {
      ++count;
      return;
    }
    for (auto nb : neighbors(at)) {
      if (nb == forbidden || seen.count(nb)) continue;
      seen.insert(nb);
      self(self, nb, left - 1);
      seen.erase(nb);
    }
  };
  dfs(dfs, {0, 0}, n);
  return count;
}

inline std::uint64_t ladder_paths(int n) {
  auto nb = [](std::pair<long, long> v) {
    std::vector<std::pair<long, long>> out{{v.first + 1, v.second}, {v.first - 1, v.second},
                                           {v.first, 1 - v.second}};
    return out;
  };
  return count_paths(n, nb, {1L << 40, 0});
}

inline std::uint64_t square_lattice_paths(int n) {
  auto nb = [](std::pair<long, long> v) {
    std::vector<std::pair<long, long>> out{{v.first + 1, v.second}, {v.first - 1, v.second},
                                           {v.first, v.second + 1}, {v.first, v.second - 1}};
    return out;
  };
  return count_paths(n, nb, {1L << 40, 0});
}

/// Gambler's ruin: P(hit 0 before K | start at i) for a walk stepping up
/// w.p. p, closed form.
inline double ruin(double p, int i, int K) {
  const double q = 1.0 - p;
  if (p == q) return 1.0 - static_cast<double>(i) / K;
  const double r = q / p;
  return (std::pow(r, i) - std::pow(r, K)) / (1.0 - std::pow(r, K));
}

/// P(X <= a), X ~ Binomial(n, s), exactly.
inline Rational binomial_cdf(unsigned n, long a, const Rational& s) {
  if (a < 0) return 0;
  const Rational f = 1 - s;
  Rational total = 0;
  BigInt c = 1;
  for (unsigned k = 0; k <= n && static_cast<long>(k) <= a; ++k) {
    total += Rational(c) * rpow(s, k) * rpow(f, n - k);
    c = c * (n - k) / (k + 1);
  }
  return total;
}

/// Three binomial standard errors around `p` for `n` trials.
inline double three_se(double p, std::uint64_t n) {
  return 3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

}  // namespace oracle
