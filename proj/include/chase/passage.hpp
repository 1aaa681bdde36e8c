#pragma once

// Passage-time models and the lazy per-edge sampler.
//
// Passage times are never stored. Each one is a pure function of
// (seed, canonical edge, color): a 64-bit hash mapped to a uniform in (0, 1)
// and pushed through the inverse CDF of the model. Undirected edges hash the
// unordered endpoint pair, so both orientations see the same sample; oriented
// lattices hash the ordered pair.

#include <cstdint>
#include <limits>
#include <string>
#include <variant>

#include "chase/topology.hpp"

namespace chase {

enum class SpreadColor : std::uint8_t { Blue = 0, Red = 1 };

inline constexpr double kInfiniteTime = std::numeric_limits<double>::infinity();

/// Red times Exp(lambda), blue times Exp(1).
struct ExponentialModel {
  double lambda = 1.0;
};

/// Red times are 1 w.p. p and infinite otherwise; blue times are 0 w.p. p
/// and m otherwise.
struct AtomicModel {
  double p = 0.5;
  std::uint32_t m = 1;
};

class PassageModel {
 public:
  static PassageModel exponential(double lambda);
  static PassageModel atomic(double p, std::uint32_t m);

  bool is_exponential() const { return std::holds_alternative<ExponentialModel>(model_); }
  bool is_atomic() const { return std::holds_alternative<AtomicModel>(model_); }
  const ExponentialModel& as_exponential() const { return std::get<ExponentialModel>(model_); }
  const AtomicModel& as_atomic() const { return std::get<AtomicModel>(model_); }

  /// Inverse CDF of the passage time for `color` at quantile u in (0, 1).
  double quantile(SpreadColor color, double u) const;

  std::string describe() const;

 private:
  explicit PassageModel(std::variant<ExponentialModel, AtomicModel> m) : model_(m) {}
  std::variant<ExponentialModel, AtomicModel> model_;
};

/// Counter-based mixing of a 64-bit word (SplitMix64 finalizer). Bijective.
std::uint64_t mix64(std::uint64_t x);

/// Hash of (seed, canonical edge, color) for the given topology.
std::uint64_t edge_hash(std::uint64_t seed, const Topology& topology, DirectedEdge edge,
                        SpreadColor color);

/// Uniform in the open interval (0, 1) derived from edge_hash.
double edge_uniform(std::uint64_t seed, const Topology& topology, DirectedEdge edge,
                    SpreadColor color);

/// Passage time of `edge` for `color`; may be +infinity under the atomic model.
double passage_time(std::uint64_t seed, const Topology& topology, DirectedEdge edge,
                    SpreadColor color, const PassageModel& model);

}  // namespace chase
