#include "chase/passage.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace chase {

PassageModel PassageModel::exponential(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("exponential model needs a finite lambda > 0");
  }
  return PassageModel(ExponentialModel{lambda});
}

PassageModel PassageModel::atomic(double p, std::uint32_t m) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("atomic model needs 0 < p < 1");
  if (m < 1) throw std::invalid_argument("atomic model needs m >= 1");
  return PassageModel(AtomicModel{p, m});
}

double PassageModel::quantile(SpreadColor color, double u) const {
  if (const auto* e = std::get_if<ExponentialModel>(&model_)) {
    const double rate = color == SpreadColor::Red ? e->lambda : 1.0;
    return -std::log1p(-u) / rate;
  }
  const auto& a = std::get<AtomicModel>(model_);
  if (color == SpreadColor::Red) return u < a.p ? 1.0 : kInfiniteTime;
  return u < a.p ? 0.0 : static_cast<double>(a.m);
}

std::string PassageModel::describe() const {
  if (const auto* e = std::get_if<ExponentialModel>(&model_)) {
    return fmt::format("exponential(lambda={})", e->lambda);
  }
  const auto& a = std::get<AtomicModel>(model_);
  return fmt::format("atomic(p={},m={})", a.p, a.m);
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t edge_hash(std::uint64_t seed, const Topology& topology, DirectedEdge edge,
                        SpreadColor color) {
  VertexKey a = edge.from;
  VertexKey b = edge.to;
  if (!topology.directed() && b < a) std::swap(a, b);
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ a);
  h = mix64(h ^ (b * 0xD6E8FEB86659FD93ULL));
  h = mix64(h ^ (color == SpreadColor::Red ? 0x5EDULL : 0xB1EULL));
  return h;
}

double edge_uniform(std::uint64_t seed, const Topology& topology, DirectedEdge edge,
                    SpreadColor color) {
  const std::uint64_t h = edge_hash(seed, topology, edge, color);
  return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
}

double passage_time(std::uint64_t seed, const Topology& topology, DirectedEdge edge,
                    SpreadColor color, const PassageModel& model) {
  return model.quantile(color, edge_uniform(seed, topology, edge, color));
}

}  // namespace chase
