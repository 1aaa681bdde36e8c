#pragma once

// Discrete-event simulator for chase-escape.
//
// Rules, for every usable edge x -> y:
//   red:  x red and y empty for a full red passage time  => y turns red
//   blue: x blue and y red for a full blue passage time  => y turns blue
// Colors only move Empty -> Red -> Blue, so each rule's precondition holds on
// a single contiguous window. An event is scheduled when the window opens and
// discarded at fire time if the precondition no longer holds. Events fire in
// nondecreasing time order; at equal times blue fires before red, so blue
// arriving at or before red's spread time blocks it.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "chase/passage.hpp"
#include "chase/topology.hpp"

namespace chase {

enum class SiteColor : std::uint8_t { Empty = 0, Red = 1, Blue = 2 };

struct SiteRecord {
  SiteColor color = SiteColor::Empty;
  std::optional<double> red_time;
  std::optional<double> blue_time;
};

struct StoppingRule {
  std::uint64_t max_radius = 100;        ///< survival proxy distance
  std::uint64_t max_events = 50'000'000;
  std::optional<double> max_sim_time;

  void validate() const;
};

enum class OutcomeStatus { RedExtinct, RedReachedRadius, Censored };

std::string to_string(OutcomeStatus status);

struct Outcome {
  OutcomeStatus status = OutcomeStatus::Censored;
  std::optional<double> extinction_time;
  std::uint64_t ever_red_count = 0;
  std::uint64_t max_red_radius = 0;
  std::uint64_t events_processed = 0;
  double end_time = 0.0;

  friend bool operator==(const Outcome&, const Outcome&) = default;
};

struct TraceRecord {
  double fire_time = 0.0;
  VertexKey from = 0;
  VertexKey to = 0;
  SpreadColor color = SpreadColor::Red;
  bool applied = false;

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

using TraceSink = std::function<void(const TraceRecord&)>;

/// One line of the event log: `fire_time,from,to,color,applied`.
std::string format_trace_line(const TraceRecord& record);

/// Inclusive coordinate box for planar snapshots.
struct Box {
  std::int64_t x_min = 0;
  std::int64_t x_max = 0;
  std::int64_t y_min = 0;
  std::int64_t y_max = 0;
};

/// Row-major colors; row 0 is y_max, column 0 is x_min.
struct ColorGrid {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<SiteColor> cells;

  SiteColor at(std::size_t row, std::size_t col) const { return cells[row * width + col]; }
};

class SnapshotError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr std::size_t kMaxSnapshotCells = std::size_t{1} << 24;

class Simulation {
 public:
  Simulation(Topology topology, PassageModel model, StoppingRule stop, std::uint64_t seed);
  ~Simulation();
  Simulation(Simulation&&) noexcept;
  Simulation& operator=(Simulation&&) noexcept;

  /// Receives every fired event, applied or stale.
  void set_trace(TraceSink sink);

  /// Runs until a stopping clause fires or red dies out. Further calls return
  /// the same outcome.
  const Outcome& run();

  bool finished() const;
  double now() const;
  const Topology& topology() const;

  SiteRecord site(VertexKey v) const;
  ColorGrid snapshot(const Box& region) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Convenience wrapper: construct, run, return the outcome.
Outcome simulate(const Topology& topology, const PassageModel& model, const StoppingRule& stop,
                 std::uint64_t seed);

struct HoleSample {
  double time = 0.0;
  std::uint64_t hole_count = 0;
};

/// Number of ladder columns where exactly one of the two sites has been
/// reached by red (red or since turned blue), sampled at time 0 and after
/// every traced event.
std::vector<HoleSample> ladder_hole_stats(const Topology& topology,
                                          std::span<const TraceRecord> trace);

}  // namespace chase
