#include "evac/engine.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

namespace evac {

namespace {

// Largest offset inside a patch along the positive axis; patches are half-open.
constexpr double kBoundaryInset = 1e-9;

double clamp_into(double v, int centre) {
  return std::clamp(v, centre - 0.5, centre + 0.5 - kBoundaryInset);
}

Vec2 clamp_to_patch(Vec2 v, GridPos p) { return {clamp_into(v.x, p.x), clamp_into(v.y, p.y)}; }

// Signed turn from heading `from` to `to`, in (-180, 180]; positive is clockwise.
double signed_turn(double from, double to) {
  double t = std::fmod(to - from, 360.0);
  if (t <= -180.0) t += 360.0;
  if (t > 180.0) t -= 360.0;
  return t;
}

}  // namespace

GridPos patch_of(Vec2 v) {
  return {static_cast<int>(std::floor(v.x + 0.5)), static_cast<int>(std::floor(v.y + 0.5))};
}

double bearing_deg(Vec2 from, Vec2 to) {
  double h = std::atan2(to.x - from.x, to.y - from.y) * 180.0 / std::numbers::pi;
  if (h < 0.0) h += 360.0;
  if (h >= 360.0) h -= 360.0;
  return h;
}

const char* to_string(Outcome outcome) {
  return outcome == Outcome::Completed ? "Completed" : "Timeout";
}

std::int64_t SimConfig::door_open_tick() const {
  return static_cast<std::int64_t>(std::ceil(exit_opening_time / tick_length - 1e-9));
}

std::int64_t SimConfig::max_ticks() const {
  return static_cast<std::int64_t>(std::ceil(max_sim_time / tick_length - 1e-9));
}

void SimConfig::validate() const {
  attributes.validate();
  const auto positive = [](double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw Error(ErrorKind::InvalidConfig, fmt::format("{} must be positive, got {}", what, v));
    }
  };
  positive(exit_opening_time, "exit opening time");
  positive(tick_length, "tick length");
  positive(acceleration, "acceleration");
  positive(deceleration, "deceleration");
  positive(patch_size, "patch size");
  positive(max_sim_time, "max simulation time");
}

Simulation::Simulation(const CabinLayout& layout, const FloorField& field, const SimConfig& config,
                       std::uint64_t seed, Empty)
    : layout_(layout),
      field_(field),
      config_(config),
      rng_(seed),
      open_tick_(config.door_open_tick()),
      occupancy_(layout.size(), -1) {
  config_.validate();
}

Simulation::Simulation(const CabinLayout& layout, const FloorField& field, const SimConfig& config,
                       std::uint64_t seed)
    : Simulation(layout, field, config, seed, Empty{}) {
  for (const GridPos seat : layout.seats()) {
    const double delay = sample_door_delay(config_.attributes, rng_);
    const double max_speed = sample_max_speed(config_.attributes, rng_);
    add_agent(seat, max_speed, delay);
  }
}

int Simulation::add_agent(GridPos patch, double max_speed, double door_delay_s) {
  if (!layout_.walkable(patch)) {
    throw Error(ErrorKind::InvalidConfig, fmt::format("patch ({}, {}) is not walkable", patch.x, patch.y));
  }
  const std::size_t pi = layout_.index_of(patch);
  if (occupancy_[pi] >= 0) {
    throw Error(ErrorKind::InvalidConfig, fmt::format("patch ({}, {}) is occupied", patch.x, patch.y));
  }
  Agent a;
  a.id = static_cast<int>(agents_.size());
  a.pos = {static_cast<double>(patch.x), static_cast<double>(patch.y)};
  a.max_speed = max_speed;
  a.door_delay_ticks = std::llround(door_delay_s / config_.tick_length);
  agents_.push_back(a);
  active_.push_back(a.id);
  occupancy_[pi] = a.id;
  return a.id;
}

int Simulation::occupant(GridPos p) const {
  return layout_.contains(p) ? occupancy_[layout_.index_of(p)] : -1;
}

void Simulation::step() {
  exited_last_step_.clear();
  if (tick_ >= open_tick_) process_exits();

  // Fisher-Yates over the live agents; the shuffle is drawn every tick.
  order_.assign(active_.begin(), active_.end());
  for (std::size_t i = order_.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng_.uniform_index(i));
    std::swap(order_[i - 1], order_[j]);
  }
  for (const int id : order_) move_agent(agents_[static_cast<std::size_t>(id)]);

  ++tick_;
}

void Simulation::process_exits() {
  const double exit_time = static_cast<double>(tick_ + 1) * config_.tick_length;
  std::erase_if(active_, [&](int id) {
    Agent& a = agents_[static_cast<std::size_t>(id)];
    const GridPos p = a.patch();
    const std::size_t pi = layout_.index_of(p);
    if (layout_.at_index(pi) != PatchKind::ExitOpen) return false;
    a.door_delay_ticks -= 1;
    if (a.door_delay_ticks > 0) return false;
    occupancy_[pi] = -1;
    exited_.push_back({id, layout_.exit_at(p)->name, exit_time});
    exited_last_step_.push_back(id);
    return true;
  });
}

void Simulation::move_agent(Agent& agent) {
  const GridPos here = agent.patch();
  const std::size_t here_index = layout_.index_of(here);
  if (layout_.at_index(here_index) == PatchKind::ExitOpen) {
    // Waiting out the door delay.
    agent.speed = 0.0;
    return;
  }

  // Climb toward a brighter neighbour: free patches before occupied ones,
  // then the brightest, then the smallest turn, then the clockwise side.
  const int here_intensity = field_.intensity_at_index(here_index);
  GridPos target{};
  bool found = false;
  bool best_free = false;
  int best_intensity = here_intensity;
  double best_turn = 0.0;
  double best_bearing = agent.heading;
  for (int dy = 1; dy >= -1; --dy) {
    for (int dx = -1; dx <= 1; ++dx) {
      if (dx == 0 && dy == 0) continue;
      const GridPos q{here.x + dx, here.y + dy};
      if (!layout_.walkable(q)) continue;
      const std::size_t qi = layout_.index_of(q);
      const int intensity = field_.intensity_at_index(qi);
      if (intensity <= here_intensity) continue;
      const bool free = occupancy_[qi] < 0;
      const double bearing =
          bearing_deg(agent.pos, {static_cast<double>(q.x), static_cast<double>(q.y)});
      const double turn = signed_turn(agent.heading, bearing);
      bool take = !found;
      if (found) {
        if (free != best_free) {
          take = free;
        } else if (intensity != best_intensity) {
          take = intensity > best_intensity;
        } else {
          const double a = std::abs(turn);
          const double b = std::abs(best_turn);
          take = a < b - 1e-12 || (a <= b + 1e-12 && turn > best_turn);
        }
      }
      if (take) {
        target = q;
        found = true;
        best_free = free;
        best_intensity = intensity;
        best_turn = turn;
        best_bearing = bearing;
      }
    }
  }
  if (!found) {
    // Local maximum (only reachable through intensity overrides): hold still.
    agent.speed = 0.0;
    return;
  }

  agent.heading = best_bearing;
  const double dx = target.x - agent.pos.x;
  const double dy = target.y - agent.pos.y;
  const double norm = std::hypot(dx, dy);
  const Vec2 dir{dx / norm, dy / norm};
  const double to_patch_units = config_.tick_length / config_.patch_size;

  const std::size_t target_index = layout_.index_of(target);
  const int blocker = occupancy_[target_index];
  if (blocker >= 0) {
    // Fall in behind: match the slower speed, then brake. Never enter the patch.
    const double ahead = agents_[static_cast<std::size_t>(blocker)].speed;
    agent.speed = std::max(0.0, std::min(agent.speed, ahead) - config_.deceleration);
    const double d = agent.speed * to_patch_units;
    agent.pos = clamp_to_patch({agent.pos.x + dir.x * d, agent.pos.y + dir.y * d}, here);
    return;
  }

  agent.speed = std::min(agent.max_speed, agent.speed + config_.acceleration);
  const double d = agent.speed * to_patch_units;
  const Vec2 next{agent.pos.x + dir.x * d, agent.pos.y + dir.y * d};
  const GridPos next_patch = patch_of(next);
  if (next_patch == target) {
    occupancy_[target_index] = agent.id;
    occupancy_[here_index] = -1;
    agent.pos = next;
  } else if (next_patch == here) {
    agent.pos = next;
  } else {
    // Cutting the corner of a diagonal move: slide along the patch edge
    // until the target itself is entered.
    agent.pos = clamp_to_patch(next, here);
  }
}

TrialResult run_trial(const CabinLayout& layout, const FloorField& field, const SimConfig& config,
                      std::uint64_t seed, const TickObserver& observer) {
  Simulation sim(layout, field, config, seed);
  if (observer) observer(sim);
  const std::int64_t max_ticks = config.max_ticks();
  while (!sim.finished() && sim.tick() < max_ticks) {
    sim.step();
    if (observer) observer(sim);
  }
  TrialResult result;
  result.seed = seed;
  result.ticks = sim.tick();
  result.exits = sim.exited();
  if (sim.finished()) {
    result.outcome = Outcome::Completed;
    result.evac_time = result.exits.empty() ? 0.0 : result.exits.back().time_s;
  } else {
    result.outcome = Outcome::Timeout;
    result.evac_time = sim.elapsed();
  }
  return result;
}

}  // namespace evac
