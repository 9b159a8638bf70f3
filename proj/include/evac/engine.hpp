#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "evac/field.hpp"
#include "evac/layout.hpp"
#include "evac/stochastic.hpp"

namespace evac {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

/// Patch containing a continuous position; patch p covers [p - 0.5, p + 0.5).
GridPos patch_of(Vec2 v);

/// Compass heading in degrees from `from` toward `to`: 0 is port (+y), 90 is the nose (+x).
double bearing_deg(Vec2 from, Vec2 to);

// Calibrated so that the built-in deck with no door delay evacuates in about
// 58 s over 100 trials.
inline constexpr double kCalibratedAcceleration = 0.15;  // m/s per tick
inline constexpr double kCalibratedSpeedLambda = 14.0;

struct SimConfig {
  // Mean door delay and the maximum-speed distribution.
  AttributeDistributions attributes{.speed_lambda = kCalibratedSpeedLambda};
  double exit_opening_time = 14.0;    // s
  double tick_length = 0.1;           // s
  double acceleration = kCalibratedAcceleration;  // m/s per tick
  double deceleration = 0.05;         // m/s per tick
  double patch_size = CabinLayout::kPatchSizeMeters;
  double max_sim_time = 600.0;        // s

  double mean_door_delay() const { return attributes.mean_door_delay; }
  /// First tick at which exits process agents.
  std::int64_t door_open_tick() const;
  std::int64_t max_ticks() const;
  void validate() const;
};

struct Agent {
  int id = 0;
  Vec2 pos;             // patch units, cabin coordinates
  double heading = 90;  // degrees
  double speed = 0;     // m/s
  double max_speed = 0; // m/s
  std::int64_t door_delay_ticks = 0;  // remaining wait on an exit

  GridPos patch() const { return patch_of(pos); }
};

struct ExitRecord {
  int agent_id;
  std::string exit;
  double time_s;
  friend bool operator==(const ExitRecord&, const ExitRecord&) = default;
};

enum class Outcome { Completed, Timeout };
const char* to_string(Outcome outcome);

struct TrialResult {
  double evac_time = 0.0;  // time of the last removal (elapsed time on timeout)
  std::vector<ExitRecord> exits;
  Outcome outcome = Outcome::Completed;
  std::uint64_t seed = 0;
  std::int64_t ticks = 0;
  friend bool operator==(const TrialResult&, const TrialResult&) = default;
};

/// One trial's mutable state. Holds references to the layout and field, which
/// must outlive it; neither is modified, so many simulations can share them.
class Simulation {
 public:
  struct Empty {};

  /// One agent per seat, in row-major seat order. Door delay then maximum
  /// speed are drawn for each agent in ascending id order.
  Simulation(const CabinLayout& layout, const FloorField& field, const SimConfig& config,
             std::uint64_t seed);
  /// No agents; populate with add_agent.
  Simulation(const CabinLayout& layout, const FloorField& field, const SimConfig& config,
             std::uint64_t seed, Empty);

  /// Places an agent at the centre of a free walkable patch. Returns its id.
  int add_agent(GridPos patch, double max_speed, double door_delay_s);

  /// Exits, then movement in a freshly shuffled order, then T <- T + 1.
  void step();

  std::int64_t tick() const { return tick_; }
  double elapsed() const { return static_cast<double>(tick_) * config_.tick_length; }
  bool finished() const { return active_.empty(); }

  /// All agents ever created, indexed by id. Only ids in active_ids() are live.
  std::span<const Agent> agents() const { return agents_; }
  std::span<const int> active_ids() const { return active_; }
  const Agent& agent(int id) const { return agents_[static_cast<std::size_t>(id)]; }
  std::size_t initial_count() const { return agents_.size(); }

  const std::vector<ExitRecord>& exited() const { return exited_; }
  /// Ids removed during the most recent step.
  std::span<const int> exited_last_step() const { return exited_last_step_; }
  /// Agent id standing on p, or -1.
  int occupant(GridPos p) const;

  const CabinLayout& layout() const { return layout_; }
  const SimConfig& config() const { return config_; }

 private:
  void process_exits();
  void move_agent(Agent& agent);

  const CabinLayout& layout_;
  const FloorField& field_;
  SimConfig config_;
  Rng rng_;
  std::int64_t tick_ = 0;
  std::int64_t open_tick_ = 0;
  std::vector<Agent> agents_;
  std::vector<int> active_;
  std::vector<int> occupancy_;
  std::vector<ExitRecord> exited_;
  std::vector<int> exited_last_step_;
  std::vector<int> order_;
};

inline Simulation init_trial(const CabinLayout& layout, const FloorField& field,
                             const SimConfig& config, std::uint64_t seed) {
  return Simulation(layout, field, config, seed);
}

/// Called with the initial state and after every step.
using TickObserver = std::function<void(const Simulation&)>;

/// Steps until every agent has left (Completed) or max_sim_time elapses (Timeout).
TrialResult run_trial(const CabinLayout& layout, const FloorField& field, const SimConfig& config,
                      std::uint64_t seed, const TickObserver& observer = {});

}  // namespace evac
