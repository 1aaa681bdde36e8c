#include "chase/topology.hpp"


#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <string>

namespace chase {

namespace {

using Buffer = std::array<std::uint64_t, Topology::kMaxDim>;

int parse_int(std::string_view text, std::string_view what) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw TopologyError("invalid " + std::string(what) + " '" + std::string(text) + "'");
  }
  return value;
}

// Reads "<prefix>:<key>=<int>".
bool parse_param(std::string_view desc, std::string_view prefix, std::string_view key, int& out) {
  if (!desc.starts_with(prefix) || desc.size() <= prefix.size() || desc[prefix.size()] != ':') {
    return false;
  }
  std::string_view rest = desc.substr(prefix.size() + 1);
  if (!rest.starts_with(key) || rest.size() <= key.size() || rest[key.size()] != '=') {
    throw TopologyError("expected '" + std::string(prefix) + ":" + std::string(key) +
                        "=<int>', got '" + std::string(desc) + "'");
  }
  out = parse_int(rest.substr(key.size() + 1), key);
  return true;
}

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
  if (a > kAuxVertex - 1 - b) {
    throw MalformedVertex("vertex outside the encodable range");
  }
  return a + b;
}

// N^K -> N bijection via prefix sums (see header).
VertexKey combinadic_encode(std::span<const std::uint64_t> z) {
  std::uint64_t code = 0;
  std::uint64_t s = 0;
  for (std::size_t i = 1; i <= z.size(); ++i) {
    s = checked_add(s, z[i - 1]);
    const std::uint64_t top = checked_add(s, i - 1);
    const std::uint64_t term = binomial_saturating(top, static_cast<unsigned>(i));
    if (term == kAuxVertex) {
      throw MalformedVertex("vertex outside the encodable range");
    }
    code = checked_add(code, term);
  }
  return code;
}

constexpr auto kFactorials = [] {
  std::array<double, Topology::kMaxDim + 1> f{};
  f[0] = 1.0;
  for (int i = 1; i <= Topology::kMaxDim; ++i) f[i] = f[i - 1] * i;
  return f;
}();

void combinadic_decode(VertexKey code, int dim, std::uint64_t* z) {
  std::uint64_t rem = code;
  std::array<std::uint64_t, Topology::kMaxDim + 1> c{};
  for (int i = dim; i >= 1; --i) {
    std::uint64_t guess;
    if (i == 1) {
      guess = rem;
    } else {
      // C(c, i) ~ (c - (i-1)/2)^i / i!; the loops below fix the estimate up
      const double est =
          std::pow(static_cast<double>(rem) * kFactorials[i], 1.0 / i) + (i - 1) / 2.0;
      guess = est >= 1.8e19 ? kAuxVertex - 1 : static_cast<std::uint64_t>(est);
      guess = std::max<std::uint64_t>(guess, static_cast<std::uint64_t>(i - 1));
      while (binomial_saturating(guess + 1, i) <= rem) ++guess;
      while (binomial_saturating(guess, i) > rem) --guess;
    }
    c[i] = guess;
    rem -= binomial_saturating(guess, i);
  }
  std::uint64_t prev = 0;
  for (int i = 1; i <= dim; ++i) {
    const std::uint64_t s = c[i] - static_cast<std::uint64_t>(i - 1);
    z[i - 1] = s - prev;
    prev = s;
  }
}

// Neighbor codes without re-encoding. With N_i = s_i + i - 1, raising z_j by
// one raises every term i >= j from C(N_i, i) to C(N_i + 1, i), a change of
// C(N_i, i - 1) (Pascal); lowering it changes term i by -C(N_i - 1, i - 1).
// shifted() applies a coordinate change of -2..+2 in O(1) from suffix sums.
class CombinadicShifter {
 public:
  CombinadicShifter(VertexKey code, const std::uint64_t* z, int dim) : code_(code) {
    std::uint64_t s = 0;
    std::array<std::uint64_t, Topology::kMaxDim + 1> n{};
    for (int i = 1; i <= dim; ++i) {
      s += z[i - 1];
      n[i] = s + static_cast<std::uint64_t>(i) - 1;
    }
    // up_[k][j]: sum over i >= j of C(N_i + k - 2, i - 1), k = 0..3
    for (auto& row : up_) row[dim + 1] = 0;
    for (int i = dim; i >= 1; --i) {
      const auto ui = static_cast<unsigned>(i - 1);
      for (int k = 0; k < 4; ++k) {
        const std::int64_t top = static_cast<std::int64_t>(n[i]) + k - 2;
        const std::uint64_t c =
            top < 0 ? 0 : binomial_saturating(static_cast<std::uint64_t>(top), ui);
        up_[k][i] = c == kAuxVertex || up_[k][i + 1] == kAuxVertex
                        ? kAuxVertex
                        : saturating_add(up_[k][i + 1], c);
      }
    }
  }

  /// Code of the tuple with coordinate j (0-based) changed by delta.
  VertexKey shifted(int j, int delta) const {
    const int i = j + 1;
    auto term = [&](int k) {
      if (up_[k][i] == kAuxVertex) throw MalformedVertex("vertex outside the encodable range");
      return up_[k][i];
    };
    switch (delta) {
      case 1: return checked_add(code_, term(2));
      case 2: return checked_add(checked_add(code_, term(2)), term(3));
      case -1: return code_ - term(1);
      case -2: return code_ - term(1) - term(0);
      default: break;
    }
    throw std::logic_error("unsupported combinadic shift");
  }

 private:
  static std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) {
    std::uint64_t r;
    return __builtin_add_overflow(a, b, &r) || r == kAuxVertex ? kAuxVertex : r;
  }

  VertexKey code_;
  std::array<std::array<std::uint64_t, Topology::kMaxDim + 2>, 4> up_{};
};

std::uint64_t abs_u64(std::int64_t x) {
  return x < 0 ? static_cast<std::uint64_t>(-(x + 1)) + 1 : static_cast<std::uint64_t>(x);
}

}  // namespace

std::uint64_t zigzag_encode(std::int64_t x) {
  return (static_cast<std::uint64_t>(x) << 1) ^ static_cast<std::uint64_t>(x >> 63);
}

std::int64_t zigzag_decode(std::uint64_t z) {
  return static_cast<std::int64_t>(z >> 1) ^ -static_cast<std::int64_t>(z & 1);
}

std::uint64_t binomial_saturating(std::uint64_t n, unsigned k) {
  if (k > n) return 0;
  const std::uint64_t kk = std::min<std::uint64_t>(k, n - k);
  std::uint64_t r = 1;
  for (std::uint64_t j = 0; j < kk; ++j) {
    // r * (n - j) is divisible by j + 1; stay in 64 bits while it fits
    std::uint64_t prod;
    if (!__builtin_mul_overflow(r, n - j, &prod)) {
      r = prod / (j + 1);
    } else {
      const unsigned __int128 wide = static_cast<unsigned __int128>(r) * (n - j) / (j + 1);
      if (wide >= kAuxVertex) return kAuxVertex;
      r = static_cast<std::uint64_t>(wide);
    }
    if (r >= kAuxVertex) return kAuxVertex;
  }
  return r;
}

Topology Topology::half_line() { return {GraphKind::HalfLine, 1}; }
Topology Topology::line() { return {GraphKind::Line, 1}; }
Topology Topology::ladder() { return {GraphKind::Ladder, 1}; }

Topology Topology::tree(int d) {
  if (d < 2) throw TopologyError("tree branching factor must be >= 2");
  return {GraphKind::DAryTree, d};
}

Topology Topology::lattice(int dim) {
  if (dim < 1 || dim > kMaxDim) throw TopologyError("lattice dimension must be in [1, 32]");
  return {GraphKind::LatticeZd, dim};
}

Topology Topology::oriented(int dim) {
  if (dim < 1 || dim > kMaxDim) throw TopologyError("lattice dimension must be in [1, 32]");
  return {GraphKind::OrientedZd, dim};
}

Topology Topology::parse(std::string_view desc) {
  if (desc == "half-line" || desc == "halfline") return half_line();
  if (desc == "line") return line();
  if (desc == "ladder") return ladder();
  int value = 0;
  if (parse_param(desc, "tree", "d", value)) return tree(value);
  if (parse_param(desc, "zd", "dim", value)) return lattice(value);
  if (parse_param(desc, "oriented-zd", "dim", value)) return oriented(value);
  if (desc.size() >= 2 && desc[0] == 'z') {
    return lattice(parse_int(desc.substr(1), "dimension"));
  }
  throw TopologyError("unknown graph descriptor '" + std::string(desc) + "'");
}

std::string Topology::descriptor() const {
  switch (kind_) {
    case GraphKind::HalfLine: return "half-line";
    case GraphKind::Line: return "line";
    case GraphKind::Ladder: return "ladder";
    case GraphKind::DAryTree: return "tree:d=" + std::to_string(param_);
    case GraphKind::LatticeZd: return "zd:dim=" + std::to_string(param_);
    case GraphKind::OrientedZd: return "oriented-zd:dim=" + std::to_string(param_);
  }
  return {};
}

void Topology::check_key(VertexKey v) const {
  if (v == kAuxVertex) {
    throw MalformedVertex("the aux vertex is not part of the graph");
  }
}

void Topology::successor_keys(VertexKey v, std::vector<VertexKey>& out) const {
  out.clear();
  if (v == kAuxVertex) {
    out.push_back(kRootVertex);
    return;
  }
  switch (kind_) {
    case GraphKind::HalfLine:
      out.push_back(checked_add(v, 1));
      out.push_back(v == 0 ? kAuxVertex : v - 1);
      return;
    case GraphKind::Line: {
      const std::int64_t x = zigzag_decode(v);
      if (x == std::numeric_limits<std::int64_t>::max() ||
          x == std::numeric_limits<std::int64_t>::min()) {
        throw MalformedVertex("line vertex at the end of the encodable range");
      }
      out.push_back(zigzag_encode(x + 1));
      out.push_back(zigzag_encode(x - 1));
      if (v == kRootVertex) out.push_back(kAuxVertex);
      return;
    }
    case GraphKind::Ladder: {
      const std::int64_t x = zigzag_decode(v >> 1);
      const std::uint64_t y = v & 1;
      if (x >= (std::int64_t{1} << 61) || x <= -(std::int64_t{1} << 61)) {
        throw MalformedVertex("ladder vertex at the end of the encodable range");
      }
      out.push_back((zigzag_encode(x + 1) << 1) | y);
      out.push_back((zigzag_encode(x - 1) << 1) | y);
      out.push_back(v ^ 1);
      if (v == kRootVertex) out.push_back(kAuxVertex);
      return;
    }
    case GraphKind::DAryTree: {
      const auto d = static_cast<std::uint64_t>(param_);
      if (v > (kAuxVertex - 1 - d) / d) {
        throw MalformedVertex("tree vertex too deep to encode its children");
      }
      for (std::uint64_t j = 1; j <= d; ++j) out.push_back(v * d + j);
      out.push_back(v == 0 ? kAuxVertex : (v - 1) / d);
      return;
    }
    case GraphKind::LatticeZd: {
      Buffer z{};
      combinadic_decode(v, param_, z.data());
      const CombinadicShifter shift(v, z.data(), param_);
      for (int i = 0; i < param_; ++i) {
        // zigzag: x >= 0 sits at 2x, x < 0 at -2x - 1
        const std::int64_t x = zigzag_decode(z[i]);
        out.push_back(shift.shifted(i, x >= 0 ? 2 : (x == -1 ? -1 : -2)));  // x + 1
        out.push_back(shift.shifted(i, x > 0 ? -2 : (x == 0 ? 1 : 2)));     // x - 1
      }
      if (v == kRootVertex) out.push_back(kAuxVertex);
      return;
    }
    case GraphKind::OrientedZd: {
      Buffer z{};
      combinadic_decode(v, param_, z.data());
      const CombinadicShifter shift(v, z.data(), param_);
      for (int i = 0; i < param_; ++i) out.push_back(shift.shifted(i, 1));
      return;
    }
  }
}

void Topology::predecessor_keys(VertexKey v, std::vector<VertexKey>& out) const {
  if (kind_ != GraphKind::OrientedZd) {
    successor_keys(v, out);
    return;
  }
  out.clear();
  if (v == kAuxVertex) return;
  if (v == kRootVertex) {
    out.push_back(kAuxVertex);
    return;
  }
  Buffer z{};
  combinadic_decode(v, param_, z.data());
  const CombinadicShifter shift(v, z.data(), param_);
  for (int i = 0; i < param_; ++i) {
    if (z[i] != 0) out.push_back(shift.shifted(i, -1));
  }
}

std::vector<DirectedEdge> Topology::neighbors(VertexKey v) const {
  std::vector<VertexKey> keys;
  successor_keys(v, keys);
  std::vector<DirectedEdge> edges;
  edges.reserve(keys.size());
  for (VertexKey w : keys) edges.push_back({v, w});
  return edges;
}

std::vector<DirectedEdge> Topology::predecessors(VertexKey v) const {
  std::vector<VertexKey> keys;
  predecessor_keys(v, keys);
  std::vector<DirectedEdge> edges;
  edges.reserve(keys.size());
  for (VertexKey u : keys) edges.push_back({u, v});
  return edges;
}

std::uint64_t Topology::distance_to_root(VertexKey v) const {
  check_key(v);
  switch (kind_) {
    case GraphKind::HalfLine: return v;
    case GraphKind::Line: return abs_u64(zigzag_decode(v));
    case GraphKind::Ladder: return abs_u64(zigzag_decode(v >> 1)) + (v & 1);
    case GraphKind::DAryTree: {
      const auto d = static_cast<std::uint64_t>(param_);
      if (d == 2) return static_cast<std::uint64_t>(std::bit_width(v + 1)) - 1;
      // level k occupies [first, first + width) with width = d^k
      std::uint64_t depth = 0, first = 0, width = 1;
      while (v - first >= width) {
        first += width;
        width *= d;
        ++depth;
      }
      return depth;
    }
    case GraphKind::LatticeZd: {
      Buffer z{};
      combinadic_decode(v, param_, z.data());
      std::uint64_t total = 0;
      for (int i = 0; i < param_; ++i) total += abs_u64(zigzag_decode(z[i]));
      return total;
    }
    case GraphKind::OrientedZd: {
      Buffer z{};
      combinadic_decode(v, param_, z.data());
      std::uint64_t total = 0;
      for (int i = 0; i < param_; ++i) total += z[i];
      return total;
    }
  }
  return 0;
}

std::vector<std::int64_t> Topology::decode(VertexKey v) const {
  check_key(v);
  switch (kind_) {
    case GraphKind::HalfLine: {
      if (v > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
        throw MalformedVertex("half-line vertex outside the signed coordinate range");
      }
      return {static_cast<std::int64_t>(v)};
    }
    case GraphKind::Line: return {zigzag_decode(v)};
    case GraphKind::Ladder: return {zigzag_decode(v >> 1), static_cast<std::int64_t>(v & 1)};
    case GraphKind::DAryTree: {
      std::vector<std::int64_t> digits;
      const auto d = static_cast<std::uint64_t>(param_);
      while (v != 0) {
        digits.push_back(static_cast<std::int64_t>((v - 1) % d));
        v = (v - 1) / d;
      }
      std::reverse(digits.begin(), digits.end());
      return digits;
    }
    case GraphKind::LatticeZd: {
      Buffer z{};
      combinadic_decode(v, param_, z.data());
      std::vector<std::int64_t> coords(param_);
      for (int i = 0; i < param_; ++i) coords[i] = zigzag_decode(z[i]);
      return coords;
    }
    case GraphKind::OrientedZd: {
      Buffer z{};
      combinadic_decode(v, param_, z.data());
      std::vector<std::int64_t> coords(param_);
      for (int i = 0; i < param_; ++i) coords[i] = static_cast<std::int64_t>(z[i]);
      return coords;
    }
  }
  return {};
}

VertexKey Topology::encode(std::span<const std::int64_t> coords) const {
  auto expect_size = [&](std::size_t n) {
    if (coords.size() != n) {
      throw MalformedVertex("expected " + std::to_string(n) + " coordinates for " + descriptor());
    }
  };
  switch (kind_) {
    case GraphKind::HalfLine:
      expect_size(1);
      if (coords[0] < 0) throw MalformedVertex("half-line coordinates are non-negative");
      return static_cast<VertexKey>(coords[0]);
    case GraphKind::Line:
      expect_size(1);
      return zigzag_encode(coords[0]);
    case GraphKind::Ladder: {
      expect_size(2);
      if (coords[1] != 0 && coords[1] != 1) throw MalformedVertex("ladder row must be 0 or 1");
      const std::uint64_t z = zigzag_encode(coords[0]);
      if (z >> 62) throw MalformedVertex("ladder column outside the encodable range");
      return (z << 1) | static_cast<std::uint64_t>(coords[1]);
    }
    case GraphKind::DAryTree: {
      const auto d = static_cast<std::uint64_t>(param_);
      std::uint64_t v = 0;
      for (std::int64_t digit : coords) {
        if (digit < 0 || static_cast<std::uint64_t>(digit) >= d) {
          throw MalformedVertex("tree digit outside [0, d)");
        }
        if (v > (kAuxVertex - 1 - d) / d) throw MalformedVertex("tree path too deep to encode");
        v = v * d + 1 + static_cast<std::uint64_t>(digit);
      }
      return v;
    }
    case GraphKind::LatticeZd: {
      expect_size(static_cast<std::size_t>(param_));
      Buffer z{};
      for (int i = 0; i < param_; ++i) z[i] = zigzag_encode(coords[i]);
      return combinadic_encode({z.data(), static_cast<std::size_t>(param_)});
    }
    case GraphKind::OrientedZd: {
      expect_size(static_cast<std::size_t>(param_));
      Buffer z{};
      for (int i = 0; i < param_; ++i) {
        if (coords[i] < 0) throw MalformedVertex("oriented lattice coordinates are non-negative");
        z[i] = static_cast<std::uint64_t>(coords[i]);
      }
      return combinadic_encode({z.data(), static_cast<std::size_t>(param_)});
    }
  }
  return 0;
}

bool Topology::has_planar_layout() const {
  return kind_ != GraphKind::DAryTree && param_ <= 2;
}

bool Topology::planar_key(std::int64_t x, std::int64_t y, VertexKey& key) const {
  switch (kind_) {
    case GraphKind::HalfLine:
      if (y != 0 || x < -1) return false;
      key = x == -1 ? kAuxVertex : static_cast<VertexKey>(x);
      return true;
    case GraphKind::Line:
      if (y != 0) return false;
      key = zigzag_encode(x);
      return true;
    case GraphKind::Ladder:
      if (y != 0 && y != 1) return false;
      key = encode(std::array<std::int64_t, 2>{x, y});
      return true;
    case GraphKind::DAryTree:
      return false;
    case GraphKind::LatticeZd:
    case GraphKind::OrientedZd: {
      if (kind_ == GraphKind::OrientedZd && x == -1 && y == 0) {
        key = kAuxVertex;
        return true;
      }
      if (kind_ == GraphKind::OrientedZd && (x < 0 || y < 0)) return false;
      if (param_ == 1) {
        if (y != 0) return false;
        key = encode(std::array<std::int64_t, 1>{x});
        return true;
      }
      if (param_ != 2) return false;
      key = encode(std::array<std::int64_t, 2>{x, y});
      return true;
    }
  }
  return false;
}

PathCount Topology::count_self_avoiding_paths(int n, std::uint64_t cap) const {
  if (n < 1) throw std::invalid_argument("path length must be >= 1");
  PathCount result;
  std::vector<VertexKey> path{kRootVertex};
  std::vector<std::vector<VertexKey>> scratch(static_cast<std::size_t>(n));

  auto dfs = [&](auto&& self, int depth) -> void {
    if (result.truncated) return;
    if (depth == n) {
      if (++result.count > cap) result.truncated = true;
      return;
    }
    auto& next = scratch[static_cast<std::size_t>(depth)];
    successor_keys(path.back(), next);
    for (VertexKey w : next) {
      if (w == kAuxVertex) continue;
      if (std::find(path.begin(), path.end(), w) != path.end()) continue;
      path.push_back(w);
      self(self, depth + 1);
      path.pop_back();
      if (result.truncated) return;
    }
  };
  dfs(dfs, 0);
  return result;
}

}  // namespace chase
