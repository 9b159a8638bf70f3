#pragma once

// Test-only generators and oracles. Nothing here calls into the code paths it
// is used to check: the field oracle relaxes distances to a fixpoint instead
// of running a BFS, and the kinematics oracle integrates the speed rule in
// closed form.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "evac/engine.hpp"
#include "evac/layout.hpp"

namespace evac::testing {

/// Random valid layout no larger than 12x12: wall border, 2-wide exits on
/// the top and/or bottom wall, random interior of wall/floor/seat. Interior
/// patches that cannot reach an exit are walled off.
inline CabinLayout random_layout(std::mt19937_64& gen) {
  std::uniform_int_distribution<int> wdist(5, 12), hdist(4, 12), pct(0, 99);
  const int w = wdist(gen);
  const int h = hdist(gen);
  std::vector<char> g(static_cast<std::size_t>(w * h), '#');
  auto at = [&](int c, int r) -> char& { return g[static_cast<std::size_t>(r * w + c)]; };
  for (int r = 1; r < h - 1; ++r) {
    for (int c = 1; c < w - 1; ++c) {
      const int roll = pct(gen);
      at(c, r) = roll < 20 ? '#' : roll < 55 ? 'S' : '.';
    }
  }
  std::uniform_int_distribution<int> exit_col(1, w - 3);
  const int top = exit_col(gen);
  at(top, 0) = at(top + 1, 0) = 'E';
  if (pct(gen) < 50) {
    const int bottom = exit_col(gen);
    at(bottom, h - 1) = at(bottom + 1, h - 1) = pct(gen) < 30 ? 'X' : 'E';
  }
  // Keep the patches under each exit open so the exits are usable.
  for (int c = 1; c < w - 1; ++c) {
    if (at(c, 0) == 'E' && at(c, 1) == '#') at(c, 1) = '.';
    if (at(c, h - 1) == 'E' && at(c, h - 2) == '#') at(c, h - 2) = '.';
  }
  // Wall off whatever is disconnected (8-connected flood from open exits).
  std::vector<bool> seen(g.size(), false);
  std::vector<std::pair<int, int>> stack;
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c)
      if (at(c, r) == 'E') {
        seen[static_cast<std::size_t>(r * w + c)] = true;
        stack.emplace_back(c, r);
      }
  while (!stack.empty()) {
    auto [c, r] = stack.back();
    stack.pop_back();
    for (int dr = -1; dr <= 1; ++dr)
      for (int dc = -1; dc <= 1; ++dc) {
        const int nc = c + dc, nr = r + dr;
        if (nc < 0 || nr < 0 || nc >= w || nr >= h) continue;
        const char k = at(nc, nr);
        const auto i = static_cast<std::size_t>(nr * w + nc);
        if ((k == '.' || k == 'S' || k == 'E') && !seen[i]) {
          seen[i] = true;
          stack.emplace_back(nc, nr);
        }
      }
  }
  std::string text;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      char& k = at(c, r);
      if ((k == '.' || k == 'S') && !seen[static_cast<std::size_t>(r * w + c)]) k = '#';
      text += k;
    }
    text += '\n';
  }
  return parse_layout(text);
}

/// Distance to the nearest open exit by repeated relaxation until nothing
/// changes. -1 marks unwalkable patches (and unreachable ones).
inline std::vector<int> relaxation_distances(int w, int h, const std::vector<PatchKind>& grid) {
  constexpr int kInf = std::numeric_limits<int>::max() / 2;
  std::vector<int> d(grid.size(), kInf);
  auto walk = [&](int c, int r) {
    return c >= 0 && r >= 0 && c < w && r < h && is_walkable(grid[static_cast<std::size_t>(r * w + c)]);
  };
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (grid[i] == PatchKind::ExitOpen) d[i] = 0;
  for (bool changed = true; changed;) {
    changed = false;
    for (int r = 0; r < h; ++r)
      for (int c = 0; c < w; ++c) {
        if (!walk(c, r)) continue;
        auto& here = d[static_cast<std::size_t>(r * w + c)];
        for (int dr = -1; dr <= 1; ++dr)
          for (int dc = -1; dc <= 1; ++dc) {
            if ((dr == 0 && dc == 0) || !walk(c + dc, r + dr)) continue;
            const int n = d[static_cast<std::size_t>((r + dr) * w + c + dc)];
            if (n != kInf && n + 1 < here) {
              here = n + 1;
              changed = true;
            }
          }
      }
  }
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (!is_walkable(grid[i]) || d[i] == kInf) d[i] = -1;
  return d;
}

/// Closed-form straight-line motion of a lone agent under the
/// accelerate-to-cap rule: speed after tick j is min(cap, j * accel), so the
/// distance covered after k ticks is accel * k(k+1)/2 until the cap tick and
/// grows by cap per tick afterwards (all in m/s, scaled to patch units).
inline double corridor_distance(int k, double accel, double cap, double tick, double patch) {
  const int cap_tick = static_cast<int>(std::floor(cap / accel + 1e-12));
  const int ramp = std::min(k, cap_tick);
  double metres_per_s_sum = accel * ramp * (ramp + 1) / 2.0;
  if (k > cap_tick) metres_per_s_sum += (k - cap_tick) * cap;
  return metres_per_s_sum * tick / patch;
}

struct InvariantReport {
  std::size_t ticks = 0;
  std::vector<std::string> violations;
};

/// Checks the engine invariants after every tick of a trial.
class InvariantChecker {
 public:
  explicit InvariantChecker(double cap = 1.05) : cap_(cap) {}

  void operator()(const Simulation& sim) {
    ++report.ticks;
    const auto& layout = sim.layout();
    const auto& cfg = sim.config();
    const double max_step_m = cap_ * cfg.tick_length + 1e-9;
    std::set<GridPos> occupied;
    for (const int id : sim.active_ids()) {
      const Agent& a = sim.agent(id);
      const GridPos p = a.patch();
      if (!occupied.insert(p).second) fail(sim, "two agents on one patch");
      if (!layout.walkable(p)) fail(sim, "agent on unwalkable patch");
      if (sim.occupant(p) != id) fail(sim, "occupancy map out of sync");
      if (a.speed < 0.0 || a.speed > a.max_speed + 1e-12) fail(sim, "speed outside [0, max]");
      if (a.max_speed > 1.05 + 1e-12 || a.max_speed < 0.3 - 1e-12) fail(sim, "max speed outside [0.3, 1.05]");
      if (a.door_delay_ticks < 0) fail(sim, "negative door delay on an active agent");
      if (auto it = last_.find(id); it != last_.end()) {
        const double moved = std::hypot(a.pos.x - it->second.x, a.pos.y - it->second.y) * cfg.patch_size;
        if (moved > max_step_m) fail(sim, "per-tick displacement above 0.105 m");
      }
      last_[id] = a.pos;
    }
    if (sim.active_ids().size() + sim.exited().size() != sim.initial_count()) fail(sim, "agents not conserved");
    for (const auto& e : sim.exited())
      if (e.time_s < cfg.exit_opening_time - 1e-9) fail(sim, "exit before doors open");
  }

  InvariantReport report;

 private:
  void fail(const Simulation& sim, const std::string& what) {
    if (report.violations.size() < 20) {
      report.violations.push_back("tick " + std::to_string(sim.tick()) + ": " + what);
    }
  }

  double cap_;
  std::map<int, Vec2> last_;
};

}  // namespace evac::testing
