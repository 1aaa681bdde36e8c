#include "chase/engine.hpp"

#include <cmath>
#include <queue>

#include <absl/container/flat_hash_map.h>
#include <fmt/format.h>

namespace chase {

void StoppingRule::validate() const {
  if (max_radius == 0) throw std::invalid_argument("max_radius must be positive");
  if (max_events == 0) throw std::invalid_argument("max_events must be positive");
  if (max_sim_time && !(*max_sim_time > 0.0)) {
    throw std::invalid_argument("max_sim_time must be positive");
  }
}

std::string to_string(OutcomeStatus status) {
  switch (status) {
    case OutcomeStatus::RedExtinct: return "red-extinct";
    case OutcomeStatus::RedReachedRadius: return "red-reached-radius";
    case OutcomeStatus::Censored: return "censored";
  }
  return "unknown";
}

std::string format_trace_line(const TraceRecord& r) {
  return fmt::format("{:.17g},{},{},{},{}", r.fire_time, r.from, r.to,
                     r.color == SpreadColor::Red ? "red" : "blue", r.applied ? "true" : "false");
}

namespace {

struct Event {
  double time;
  std::uint64_t order;  // color in the top bit (blue = 0), then sequence number
  VertexKey from;
  VertexKey to;

  SpreadColor color() const { return (order >> 63) != 0 ? SpreadColor::Red : SpreadColor::Blue; }
};

// Min-heap order: time, then blue before red, then insertion order.
struct FiresLater {
  bool operator()(const Event& a, const Event& b) const {
    if (a.time != b.time) return a.time > b.time;
    return a.order > b.order;
  }
};

struct Site {
  SiteColor color;
  double red_time;
  double blue_time;
};

}  // namespace

struct Simulation::Impl {
  Topology topology;
  PassageModel model;
  StoppingRule stop;
  std::uint64_t seed;
  TraceSink trace;

  absl::flat_hash_map<VertexKey, Site> sites;
  std::priority_queue<Event, std::vector<Event>, FiresLater> queue;
  std::vector<VertexKey> scratch;
  std::uint64_t next_seq = 0;
  std::uint64_t live_red = 0;
  double now = 0.0;
  bool finished = false;
  Outcome outcome;

  Impl(Topology t, PassageModel m, StoppingRule s, std::uint64_t sd)
      : topology(t), model(m), stop(s), seed(sd) {
    stop.validate();
    sites.emplace(kAuxVertex, Site{SiteColor::Blue, NAN, 0.0});
    sites.emplace(kRootVertex, Site{SiteColor::Red, 0.0, NAN});
    live_red = 1;
    outcome.ever_red_count = 1;
    on_red(kRootVertex);
  }

  SiteColor color_of(VertexKey v) const {
    auto it = sites.find(v);
    return it == sites.end() ? SiteColor::Empty : it->second.color;
  }

  void schedule(SpreadColor color, VertexKey from, VertexKey to) {
    const double dt = passage_time(seed, topology, {from, to}, color, model);
    if (std::isinf(dt)) return;
    const std::uint64_t tag = color == SpreadColor::Red ? std::uint64_t{1} << 63 : 0;
    queue.push(Event{now + dt, tag | next_seq++, from, to});
  }

  // v just turned red: open red windows toward empty successors and blue
  // windows from blue predecessors.
  void on_red(VertexKey v) {
    topology.successor_keys(v, scratch);
    if (!topology.directed()) {
      // successors and predecessors coincide
      for (VertexKey w : scratch) {
        const SiteColor c = color_of(w);
        if (c == SiteColor::Empty) {
          schedule(SpreadColor::Red, v, w);
        } else if (c == SiteColor::Blue) {
          schedule(SpreadColor::Blue, w, v);
        }
      }
      return;
    }
    for (VertexKey w : scratch) {
      if (color_of(w) == SiteColor::Empty) schedule(SpreadColor::Red, v, w);
    }
    topology.predecessor_keys(v, scratch);
    for (VertexKey u : scratch) {
      if (color_of(u) == SiteColor::Blue) schedule(SpreadColor::Blue, u, v);
    }
  }

  void on_blue(VertexKey v) {
    topology.successor_keys(v, scratch);
    for (VertexKey w : scratch) {
      if (color_of(w) == SiteColor::Red) schedule(SpreadColor::Blue, v, w);
    }
  }

  void finish(OutcomeStatus status) {
    finished = true;
    outcome.status = status;
    outcome.end_time = now;
    if (status == OutcomeStatus::RedExtinct) outcome.extinction_time = now;
  }

  void run() {
    while (!finished) {
      if (queue.empty()) {
        // Blue reaches every red site on the supported graphs, so an empty
        // queue with red alive means nothing more can happen.
        finish(live_red == 0 ? OutcomeStatus::RedExtinct : OutcomeStatus::Censored);
        break;
      }
      if (outcome.events_processed >= stop.max_events) {
        finish(OutcomeStatus::Censored);
        break;
      }
      const Event ev = queue.top();
      if (stop.max_sim_time && ev.time > *stop.max_sim_time) {
        finish(OutcomeStatus::Censored);
        break;
      }
      queue.pop();
      ++outcome.events_processed;
      now = ev.time;

      if (ev.color() == SpreadColor::Red) {
        bool applied = false;
        if (color_of(ev.from) == SiteColor::Red) {
          applied = sites.try_emplace(ev.to, Site{SiteColor::Red, now, NAN}).second;
        }
        if (trace) trace({ev.time, ev.from, ev.to, ev.color(), applied});
        if (!applied) continue;
        ++live_red;
        ++outcome.ever_red_count;
        const std::uint64_t dist = topology.distance_to_root(ev.to);
        if (dist > outcome.max_red_radius) outcome.max_red_radius = dist;
        if (dist >= stop.max_radius) {
          finish(OutcomeStatus::RedReachedRadius);
          break;
        }
        on_red(ev.to);
      } else {
        auto it = sites.find(ev.to);
        const bool applied = color_of(ev.from) == SiteColor::Blue && it != sites.end() &&
                             it->second.color == SiteColor::Red;
        if (trace) trace({ev.time, ev.from, ev.to, ev.color(), applied});
        if (!applied) continue;
        it->second.color = SiteColor::Blue;
        it->second.blue_time = now;
        if (--live_red == 0) {
          finish(OutcomeStatus::RedExtinct);
          break;
        }
        on_blue(ev.to);
      }
    }
  }
};

Simulation::Simulation(Topology topology, PassageModel model, StoppingRule stop,
                       std::uint64_t seed)
    : impl_(std::make_unique<Impl>(topology, model, stop, seed)) {}

Simulation::~Simulation() = default;
Simulation::Simulation(Simulation&&) noexcept = default;
Simulation& Simulation::operator=(Simulation&&) noexcept = default;

void Simulation::set_trace(TraceSink sink) { impl_->trace = std::move(sink); }

const Outcome& Simulation::run() {
  impl_->run();
  return impl_->outcome;
}

bool Simulation::finished() const { return impl_->finished; }
double Simulation::now() const { return impl_->now; }
const Topology& Simulation::topology() const { return impl_->topology; }

SiteRecord Simulation::site(VertexKey v) const {
  SiteRecord record;
  auto it = impl_->sites.find(v);
  if (it == impl_->sites.end()) return record;
  record.color = it->second.color;
  if (!std::isnan(it->second.red_time)) record.red_time = it->second.red_time;
  if (!std::isnan(it->second.blue_time)) record.blue_time = it->second.blue_time;
  return record;
}

ColorGrid Simulation::snapshot(const Box& region) const {
  const Topology& t = impl_->topology;
  if (!t.has_planar_layout()) {
    throw SnapshotError("snapshots need a planar topology, got " + t.descriptor());
  }
  if (region.x_max < region.x_min || region.y_max < region.y_min) {
    throw SnapshotError("empty snapshot region");
  }
  const auto width = static_cast<unsigned __int128>(region.x_max - region.x_min) + 1;
  const auto height = static_cast<unsigned __int128>(region.y_max - region.y_min) + 1;
  if (width * height > kMaxSnapshotCells) {
    throw SnapshotError(fmt::format("snapshot region too large (limit {} cells)",
                                    kMaxSnapshotCells));
  }
  ColorGrid grid;
  grid.width = static_cast<std::size_t>(width);
  grid.height = static_cast<std::size_t>(height);
  grid.cells.assign(grid.width * grid.height, SiteColor::Empty);
  for (std::size_t row = 0; row < grid.height; ++row) {
    const std::int64_t y = region.y_max - static_cast<std::int64_t>(row);
    for (std::size_t col = 0; col < grid.width; ++col) {
      const std::int64_t x = region.x_min + static_cast<std::int64_t>(col);
      VertexKey key = 0;
      if (!t.planar_key(x, y, key)) continue;
      grid.cells[row * grid.width + col] = impl_->color_of(key);
    }
  }
  return grid;
}

Outcome simulate(const Topology& topology, const PassageModel& model, const StoppingRule& stop,
                 std::uint64_t seed) {
  Simulation sim(topology, model, stop, seed);
  return sim.run();
}

std::vector<HoleSample> ladder_hole_stats(const Topology& topology,
                                          std::span<const TraceRecord> trace) {
  if (topology.kind() != GraphKind::Ladder) {
    throw std::invalid_argument("hole statistics are defined on the ladder only");
  }
  // Column -> number of its two sites ever reached by red.
  absl::flat_hash_map<std::uint64_t, int> reached;
  reached[kRootVertex >> 1] = 1;
  std::uint64_t holes = 1;
  std::vector<HoleSample> samples;
  samples.reserve(trace.size() + 1);
  samples.push_back({0.0, holes});
  for (const TraceRecord& r : trace) {
    if (r.applied && r.color == SpreadColor::Red) {
      int& count = reached[r.to >> 1];
      ++count;
      if (count == 1) {
        ++holes;
      } else {
        --holes;
      }
    }
    samples.push_back({r.fire_time, holes});
  }
  return samples;
}

}  // namespace chase
