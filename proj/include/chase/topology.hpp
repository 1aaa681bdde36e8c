#pragma once

// Implicit graph topologies for chase-escape.
//
// Every vertex is a packed 64-bit key, so unbounded graphs need no storage.
// Every topology has a root (key 0) that starts red and an auxiliary blue
// vertex (kAuxVertex) that is attached to the root only and is not part of
// the graph proper.
//
// Key layouts:
//   half-line    x >= 0                      -> x          (aux plays x = -1)
//   line         x in Z                      -> zigzag(x)
//   ladder       (x, y) in Z x {0,1}         -> 2*zigzag(x) + y
//   tree:d=D     digit string from the root  -> heap index (children D*v+1..D*v+D)
//   zd:dim=K     x in Z^K                    -> combinadic of zigzagged coords
//   oriented-zd  x in N^K                    -> combinadic of raw coords
//
// The combinadic code of a non-negative tuple z_1..z_K with prefix sums s_i is
// sum_i C(s_i + i - 1, i), a bijection N^K -> N that keeps codes small near
// the origin in every dimension.

#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace chase {

using VertexKey = std::uint64_t;

inline constexpr VertexKey kRootVertex = 0;
inline constexpr VertexKey kAuxVertex = std::numeric_limits<std::uint64_t>::max();

struct DirectedEdge {
  VertexKey from = 0;
  VertexKey to = 0;

  friend bool operator==(const DirectedEdge&, const DirectedEdge&) = default;
};

enum class GraphKind { HalfLine, Line, Ladder, DAryTree, LatticeZd, OrientedZd };

/// Raised for keys that do not name a vertex, or whose neighbors fall outside
/// the encodable range.
class MalformedVertex : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a topology descriptor or parameter is invalid.
class TopologyError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Result of a bounded self-avoiding path enumeration.
struct PathCount {
  std::uint64_t count = 0;
  bool truncated = false;  ///< enumeration stopped because count exceeded the cap
};

class Topology {
 public:
  static constexpr int kMaxDim = 32;

  static Topology half_line();
  static Topology line();
  static Topology ladder();
  static Topology tree(int d);
  static Topology lattice(int dim);
  static Topology oriented(int dim);

  /// Parses "half-line", "line", "ladder", "tree:d=3", "zd:dim=2" (or "z2"),
  /// "oriented-zd:dim=8".
  static Topology parse(std::string_view descriptor);

  std::string descriptor() const;
  GraphKind kind() const { return kind_; }
  /// Branching factor for trees, dimension for lattices, 1 otherwise.
  int param() const { return param_; }
  bool directed() const { return kind_ == GraphKind::OrientedZd; }

  /// Edges along which a particle at v may spread. For undirected graphs this
  /// includes the edge back toward the aux vertex at the root.
  std::vector<DirectedEdge> neighbors(VertexKey v) const;
  /// Edges u -> v along which a particle may spread into v.
  std::vector<DirectedEdge> predecessors(VertexKey v) const;

  /// Allocation-free forms used by the engine: clear `out` and fill it with
  /// the target (resp. source) keys.
  void successor_keys(VertexKey v, std::vector<VertexKey>& out) const;
  void predecessor_keys(VertexKey v, std::vector<VertexKey>& out) const;

  /// Graph distance from the root (l1 norm on lattices, depth on trees).
  std::uint64_t distance_to_root(VertexKey v) const;

  /// Coordinates for lattice-like graphs, digit string for trees.
  std::vector<std::int64_t> decode(VertexKey v) const;
  VertexKey encode(std::span<const std::int64_t> coords) const;

  /// Key of the planar site (x, y) for lattice-like graphs of dimension <= 2,
  /// including the aux vertex where it has a position (half-line x = -1,
  /// oriented (-1, 0)). Returns false when the site is not in the graph.
  bool planar_key(std::int64_t x, std::int64_t y, VertexKey& key) const;
  bool has_planar_layout() const;

  /// Exact number of self-avoiding paths with n edges that start at the root
  /// and avoid the aux vertex. Stops once the count exceeds `cap`.
  PathCount count_self_avoiding_paths(int n, std::uint64_t cap) const;

  friend bool operator==(const Topology&, const Topology&) = default;

 private:
  Topology(GraphKind kind, int param) : kind_(kind), param_(param) {}

  void check_key(VertexKey v) const;

  GraphKind kind_;
  int param_;
};

// Codec helpers, exposed for tests.
std::uint64_t zigzag_encode(std::int64_t x);
std::int64_t zigzag_decode(std::uint64_t z);
/// C(n, k) saturating to UINT64_MAX on overflow.
std::uint64_t binomial_saturating(std::uint64_t n, unsigned k);

}  // namespace chase
