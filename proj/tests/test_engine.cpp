#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "evac/engine.hpp"
#include "evac/error.hpp"
#include "support/test_support.hpp"

using namespace evac;

namespace {

// Row 1 is a straight corridor ending at a vertical exit pair on the left.
const char* kCorridor =
    "##########\n"
    "E........S\n"
    "E#########\n";

GridPos cell(const CabinLayout& l, int col, int row) {
  return l.pos_of(static_cast<std::size_t>(row * l.width() + col));
}

SimConfig quiet_config() {
  SimConfig c;
  c.attributes.mean_door_delay = 0.0;
  return c;
}

}  // namespace

TEST_CASE("initial population on the built-in deck") {
  const auto layout = generate_a380_upper_deck();
  const FloorField field(layout);
  auto cfg = quiet_config();
  cfg.attributes.mean_door_delay = 1.0;
  const Simulation sim(layout, field, cfg, 42);
  REQUIRE(sim.initial_count() == 199);
  std::set<GridPos> seen;
  for (const Agent& a : sim.agents()) {
    CHECK(layout.at(a.patch()) == PatchKind::Seat);
    CHECK(a.pos.x == a.patch().x);
    CHECK(a.pos.y == a.patch().y);
    CHECK(a.heading == 90.0);
    CHECK(a.speed == 0.0);
    CHECK(a.max_speed >= 0.3);
    CHECK(a.max_speed <= 1.05);
    CHECK(a.door_delay_ticks >= 0);
    seen.insert(a.patch());
  }
  CHECK(seen.size() == 199);
  CHECK(sim.tick() == 0);
}

TEST_CASE("no door delay when D is zero") {
  const auto layout = generate_a380_upper_deck();
  const FloorField field(layout);
  const Simulation sim(layout, field, quiet_config(), 3);
  for (const Agent& a : sim.agents()) CHECK(a.door_delay_ticks == 0);
}

TEST_CASE("a layout without seats finishes at once") {
  const auto layout = parse_layout("####\nEE..\n####\n");
  const FloorField field(layout);
  const auto r = run_trial(layout, field, quiet_config(), 1);
  CHECK(r.outcome == Outcome::Completed);
  CHECK(r.evac_time == 0.0);
  CHECK(r.ticks == 0);
  CHECK(r.exits.empty());
}

TEST_CASE("doors open at tick 140") {
  const auto layout = parse_layout(kCorridor);
  const FloorField field(layout);
  const auto cfg = quiet_config();
  REQUIRE(cfg.door_open_tick() == 140);
  Simulation sim(layout, field, cfg, 1, Simulation::Empty{});
  sim.add_agent(cell(layout, 0, 1), 1.0, 0.0);
  for (int t = 0; t < 140; ++t) sim.step();
  CHECK(sim.active_ids().size() == 1);  // tick 139 did not process the exit
  sim.step();
  REQUIRE(sim.finished());
  CHECK(sim.exited()[0].time_s == doctest::Approx(14.1));
  CHECK(sim.exited()[0].exit == layout.exit_at(cell(layout, 0, 1))->name);
}

TEST_CASE("door delay of 0.3 s holds the agent for three ticks") {
  const auto layout = parse_layout(kCorridor);
  const FloorField field(layout);
  auto cfg = quiet_config();
  cfg.exit_opening_time = 0.1;
  Simulation sim(layout, field, cfg, 1, Simulation::Empty{});
  sim.add_agent(cell(layout, 0, 1), 1.0, 0.3);
  REQUIRE(sim.agent(0).door_delay_ticks == 3);
  sim.step();  // tick 0: doors still closed
  sim.step();
  sim.step();
  CHECK_FALSE(sim.finished());
  CHECK(sim.agent(0).speed == 0.0);
  sim.step();
  REQUIRE(sim.finished());
  CHECK(sim.exited()[0].time_s == doctest::Approx(0.4));
}

TEST_CASE("first step from rest") {
  const auto layout = parse_layout(kCorridor);
  const FloorField field(layout);
  auto cfg = quiet_config();
  cfg.acceleration = 0.05;
  Simulation sim(layout, field, cfg, 1, Simulation::Empty{});
  const GridPos start = cell(layout, 8, 1);
  sim.add_agent(start, 1.0, 0.0);
  sim.step();
  const Agent& a = sim.agent(0);
  CHECK(a.speed == doctest::Approx(0.05));
  CHECK(a.pos.x == doctest::Approx(start.x - 0.01));
  CHECK(a.pos.y == start.y);
  CHECK(a.heading == doctest::Approx(270.0));
}

TEST_CASE("a stationary agent ahead brings the follower to rest") {
  const auto layout = parse_layout(kCorridor);
  const FloorField field(layout);
  Simulation sim(layout, field, quiet_config(), 9, Simulation::Empty{});
  const int leader = sim.add_agent(cell(layout, 4, 1), 0.0, 0.0);
  const int follower = sim.add_agent(cell(layout, 8, 1), 1.0, 0.0);
  for (int t = 0; t < 100; ++t) sim.step();
  CHECK(sim.agent(leader).patch() == cell(layout, 4, 1));
  CHECK(sim.agent(follower).patch() == cell(layout, 5, 1));
  CHECK(sim.agent(follower).speed == 0.0);
}

TEST_CASE("speed never exceeds the agent's cap") {
  const auto layout = parse_layout(kCorridor);
  const FloorField field(layout);
  Simulation sim(layout, field, quiet_config(), 2, Simulation::Empty{});
  sim.add_agent(cell(layout, 8, 1), 0.4, 0.0);
  double top = 0.0;
  for (int t = 0; t < 60; ++t) {
    sim.step();
    top = std::max(top, sim.agent(0).speed);
  }
  CHECK(top == doctest::Approx(0.4));
  CHECK(top <= 0.4);
}

TEST_CASE("corridor run matches the kinematics oracle tick for tick") {
  const auto layout = parse_layout(kCorridor);
  const FloorField field(layout);
  for (const double cap : {0.3, 0.65, 0.95, 1.05}) {
    CAPTURE(cap);
    auto cfg = quiet_config();
    cfg.exit_opening_time = 0.1;
    Simulation sim(layout, field, cfg, 11, Simulation::Empty{});
    const GridPos start = cell(layout, 8, 1);
    const GridPos exit = cell(layout, 0, 1);
    sim.add_agent(start, cap, 0.0);

    int k = 0;
    while (sim.agent(0).patch() != exit) {
      sim.step();
      ++k;
      REQUIRE(k < 500);
      const double travelled =
          testing::corridor_distance(k, cfg.acceleration, cap, cfg.tick_length, cfg.patch_size);
      const Agent& a = sim.agent(0);
      if (a.patch() == exit) break;
      CHECK(a.pos.x == doctest::Approx(start.x - travelled).epsilon(1e-9));
      CHECK(a.pos.y == start.y);
    }
    // The oracle agrees on the arrival tick, and removal happens on the next step.
    const double need = start.x - exit.x - 0.5;
    CHECK(testing::corridor_distance(k, cfg.acceleration, cap, cfg.tick_length, cfg.patch_size) > need);
    CHECK(testing::corridor_distance(k - 1, cfg.acceleration, cap, cfg.tick_length, cfg.patch_size) <= need);
    sim.step();
    REQUIRE(sim.finished());
    CHECK(sim.exited()[0].time_s == doctest::Approx((k + 1) * cfg.tick_length));
  }
}

TEST_CASE("trials are reproducible") {
  const auto layout = generate_a380_upper_deck();
  const FloorField field(layout);
  auto cfg = quiet_config();
  cfg.attributes.mean_door_delay = 0.5;
  const auto a = run_trial(layout, field, cfg, 17);
  const auto b = run_trial(layout, field, cfg, 17);
  const auto c = run_trial(layout, field, cfg, 18);
  CHECK(a == b);
  CHECK(a.exits.size() == 199);
  CHECK(a.outcome == Outcome::Completed);
  CHECK(a.evac_time == a.exits.back().time_s);
  CHECK_FALSE(a == c);
}

TEST_CASE("timeout reports elapsed time") {
  const auto layout = generate_a380_upper_deck();
  const FloorField field(layout);
  auto cfg = quiet_config();
  cfg.max_sim_time = 20.0;
  const auto r = run_trial(layout, field, cfg, 1);
  CHECK(r.outcome == Outcome::Timeout);
  CHECK(r.ticks == 200);
  CHECK(r.evac_time == doctest::Approx(20.0));
  CHECK(r.exits.size() < 199);
}

TEST_CASE("add_agent rejects walls and occupied patches") {
  const auto layout = parse_layout(kCorridor);
  const FloorField field(layout);
  Simulation sim(layout, field, quiet_config(), 1, Simulation::Empty{});
  CHECK_THROWS_AS(sim.add_agent(cell(layout, 3, 0), 1.0, 0.0), Error);
  sim.add_agent(cell(layout, 3, 1), 1.0, 0.0);
  CHECK_THROWS_AS(sim.add_agent(cell(layout, 3, 1), 1.0, 0.0), Error);
}

TEST_CASE("invariants hold on random layouts and on the built-in deck") {
  std::mt19937_64 gen(2718);
  for (int i = 0; i < 25; ++i) {
    const auto layout = testing::random_layout(gen);
    const FloorField field(layout);
    auto cfg = quiet_config();
    cfg.attributes.mean_door_delay = 0.1 * (i % 16);
    testing::InvariantChecker check;
    const auto r = run_trial(layout, field, cfg, 1000 + i, std::ref(check));
    CAPTURE(serialize_layout(layout));
    CHECK(r.outcome == Outcome::Completed);
    CHECK(r.exits.size() == layout.seats().size());
    CHECK(check.report.violations.empty());
  }
  const auto deck = generate_a380_upper_deck();
  const FloorField field(deck);
  auto cfg = quiet_config();
  cfg.attributes.mean_door_delay = 1.5;
  testing::InvariantChecker check;
  const auto r = run_trial(deck, field, cfg, 5, std::ref(check));
  CHECK(r.outcome == Outcome::Completed);
  for (const auto& v : check.report.violations) MESSAGE(v);
  CHECK(check.report.violations.empty());
}
