#include <gtest/gtest.h>

#include <numbers>

#include "thermal_cbf/error.hpp"
#include "thermal_cbf/sim_harness.hpp"

using namespace thermal_cbf;

namespace {

Scenario small_scenario() {
  Scenario s;
  s.sense = {100, 100, 0.02};
  s.synthesis.delta_m = 0.15;
  s.synthesis.robot_radius_m = 0.1;
  s.synthesis.solver = SolverKind::Bicgstab;
  s.start = {0.5, 0.5, 0.0};
  s.goals = {{1.5, 0.5}};
  return s;
}

bool same_log(const EpisodeLog& a, const EpisodeLog& b) {
  if (a.steps.size() != b.steps.size() || a.reason != b.reason) return false;
  for (std::size_t k = 0; k < a.steps.size(); ++k) {
    const auto &x = a.steps[k], &y = b.steps[k];
    if (x.t != y.t || x.state.x != y.state.x || x.state.y != y.state.y || x.state.theta != y.state.theta ||
        x.h != y.h || x.u != y.u || x.grad != y.grad || x.iterations != y.iterations)
      return false;
  }
  return true;
}

}  // namespace

TEST(RasterizeWorld, EmptyCircleAndRectangle) {
  Scenario s;
  s.arena = {1.0, 1.0};
  EXPECT_EQ(rasterize_world(s).occupied_count(), 0u);

  s.obstacles = {CircleObstacle{{0.5, 0.5}, 0.15}};
  const double area = std::numbers::pi * 15 * 15;
  EXPECT_NEAR(double(rasterize_world(s).occupied_count()), area, 0.05 * area);

  s.obstacles = {RectObstacle{{0.3, 0.4}, {0.2, 0.2}}};
  const GridMap g = rasterize_world(s);
  EXPECT_EQ(g.occupied_count(), 400u);
  EXPECT_TRUE(g.occupied(40, 30));
  EXPECT_FALSE(g.occupied(39, 30));

  s.obstacles = {CircleObstacle{{0.95, 0.5}, 0.1}};
  EXPECT_THROW(rasterize_world(s), ConfigError);
}

TEST(SenseLocal, EmptyCornerAndRoundTrip) {
  GridMap world(300, 300, 0.01, {0.005, 0.005});
  const GridMap empty = sense_local(world, {1.5, 1.5}, {});
  EXPECT_EQ(empty.height(), 200u);
  EXPECT_EQ(empty.occupied_count(), 0u);

  world.set_occupied(5, 7);
  world.set_occupied(250, 120);
  const GridMap corner = sense_local(world, {0.02, 0.03}, {});
  EXPECT_EQ(corner.occupied_count(), 1u);
  const Cell c = corner.cell_containing(world.cell_center({5, 7}));
  EXPECT_TRUE(corner.occupied(c));
  const Vec2 w = world.cell_center({5, 7}), l = corner.cell_center(c);
  EXPECT_NEAR(w.x, l.x, 1e-12);
  EXPECT_NEAR(w.y, l.y, 1e-12);
  // Off-map cells read free.
  EXPECT_FALSE(corner.occupied(0, 0));
  // Window is centered on the robot cell.
  const Cell center = corner.cell_containing({0.02, 0.03});
  EXPECT_EQ(center, (Cell{100, 100}));
}

TEST(Scenario, JsonRoundTripAndValidation) {
  Scenario s = small_scenario();
  s.obstacles = {CircleObstacle{{1.0, 1.0}, 0.15}, RectObstacle{{2.0, 2.0}, {0.2, 0.3}}};
  s.model = ModelKind::Unicycle;
  s.diffeo.r = 0.04;
  const Scenario back = scenario_from_json(to_json(s));
  EXPECT_EQ(to_json(back), to_json(s));

  Scenario bad = s;
  bad.goals.clear();
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = s;
  bad.sense.height = 101;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = s;
  bad.start = {1.0, 1.05, 0.0};
  EXPECT_THROW(bad.validate(), ConfigError);
  EXPECT_THROW(scenario_from_json(nlohmann::json{{"obstacles", {{{"type", "hexagon"}}}}}), ConfigError);
}

TEST(Scenario, RandomObstaclesAreSeeded) {
  Scenario s = small_scenario();
  s.random_obstacles = RandomObstacleSpec{.count = 6, .seed = 4};
  Scenario a = s, b = s, c = s;
  materialize_random_obstacles(a);
  materialize_random_obstacles(b);
  materialize_random_obstacles(c, 5);
  EXPECT_EQ(a.obstacles.size(), 6u);
  EXPECT_EQ(to_json(a), to_json(b));
  EXPECT_NE(to_json(a), to_json(c));
  EXPECT_NO_THROW(a.validate());
}

TEST(RunEpisode, EmptyArenaFollowsNominal) {
  Scenario s = small_scenario();
  const EpisodeLog log = run_episode(s);
  EXPECT_EQ(log.reason, Termination::AllGoalsReached);
  const double expected = 1.0 / s.nominal.k / s.dt;
  EXPECT_NEAR(double(log.steps.size()), expected, 2.0);
  for (std::size_t k = 0; k < log.steps.size(); ++k) {
    const auto& r = log.steps[k];
    EXPECT_TRUE(r.obstacle_free);
    EXPECT_EQ(r.u, r.u_nom);
    if (k > 0) EXPECT_NEAR(r.t - log.steps[k - 1].t, s.dt, 1e-12);
  }
  const Metrics m = metrics(log, s);
  EXPECT_EQ(m.collisions, 0u);
  EXPECT_EQ(m.min_h, s.synthesis.boundary.b_val);
  EXPECT_EQ(m.goals_reached, 1u);
}

TEST(RunEpisode, PassesThroughGapInWall) {
  Scenario s = small_scenario();
  s.arena = {3.0, 3.0};
  s.start = {1.5, 0.6, std::numbers::pi / 2};
  s.goals = {{1.5, 2.4}};
  // Wall across y = 1.5 with a 0.6 m gap around x = 1.5.
  s.obstacles = {RectObstacle{{0.0, 1.45}, {1.2, 0.1}}, RectObstacle{{1.8, 1.45}, {1.2, 0.1}}};
  s.max_steps = 1500;
  const EpisodeLog log = run_episode(s);
  const Metrics m = metrics(log, s);
  EXPECT_EQ(m.goals_reached, 1u);
  EXPECT_EQ(m.collisions, 0u);
  EXPECT_GT(m.min_h, 0.0);
  bool crossed_in_gap = false;
  for (std::size_t k = 1; k < log.steps.size(); ++k) {
    const auto &a = log.steps[k - 1].state, &b = log.steps[k].state;
    if (a.y < 1.5 && b.y >= 1.5) crossed_in_gap = b.x > 1.2 && b.x < 1.8;
  }
  EXPECT_TRUE(crossed_in_gap);
}

TEST(RunEpisode, StartInsideObstacleIsRejected) {
  Scenario s = small_scenario();
  s.obstacles = {CircleObstacle{{0.5, 0.5}, 0.2}};
  EXPECT_THROW(run_episode(s), ConfigError);
  s.obstacles = {CircleObstacle{{0.7, 0.5}, 0.15}};  // outside, but inside the inflated band
  EXPECT_THROW(run_episode(s), ConfigError);
}

TEST(RunEpisode, DeterministicAndTimingsAddUp) {
  Scenario s = small_scenario();
  s.arena = {2.0, 2.0};
  s.obstacles = {CircleObstacle{{1.0, 0.55}, 0.15}};
  s.model = ModelKind::Unicycle;
  s.max_steps = 300;
  const EpisodeLog a = run_episode(s), b = run_episode(s);
  EXPECT_TRUE(same_log(a, b));
  for (const auto& r : a.steps) {
    EXPECT_GE(r.assembly_ms, 0.0);
    EXPECT_GE(r.solve_ms, 0.0);
    EXPECT_GE(r.sampling_ms, 0.0);
    EXPECT_GE(r.filter_ms, 0.0);
    EXPECT_DOUBLE_EQ(r.step_ms(), r.assembly_ms + r.solve_ms + r.sampling_ms + r.filter_ms);
  }
  EXPECT_EQ(metrics(a, s).collisions, 0u);
}

TEST(Metrics, AggregatesSyntheticLog) {
  Scenario s = small_scenario();
  s.obstacles = {CircleObstacle{{2.0, 2.0}, 0.2}};
  EpisodeLog log;
  log.goals_total = 1;
  for (double h : {0.5, 0.1, -0.2, 0.3}) {
    StepRecord r;
    r.t = double(log.steps.size()) * s.dt;
    r.h = h;
    r.state = {1.0, 1.0, 0.0};
    log.steps.push_back(r);
  }
  log.steps[1].state = {2.0, 2.1, 0.0};
  log.final_state = log.steps.back().state;
  const Metrics m = metrics(log, s);
  EXPECT_EQ(m.min_h, -0.2);
  EXPECT_EQ(m.collisions, 1u);
  EXPECT_EQ(m.steps, 4u);
}

TEST(RunMultiEpisode, RobotsAvoidEachOther) {
  Scenario s = small_scenario();
  s.arena = {2.0, 2.0};
  s.start = {0.4, 1.0, 0.0};
  s.goals = {{1.6, 1.02}};
  s.agents = {Agent{{1.6, 1.0, std::numbers::pi}, {{0.4, 0.98}}}};
  s.max_steps = 600;
  const auto logs = run_multi_episode(s);
  ASSERT_EQ(logs.size(), 2u);
  ASSERT_EQ(logs[0].steps.size(), logs[1].steps.size());
  double closest = 1e9;
  for (std::size_t k = 0; k < logs[0].steps.size(); ++k)
    closest = std::min(closest, norm(logs[0].steps[k].state.position() - logs[1].steps[k].state.position()));
  EXPECT_GT(closest, s.synthesis.robot_radius_m);
}
