#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "thermal_cbf/cbf_field.hpp"
#include "thermal_cbf/robot_models.hpp"
#include "thermal_cbf/safety_filter.hpp"

namespace thermal_cbf {

struct CircleObstacle {
  Vec2 center;
  double radius = 0.0;
};

/// Axis-aligned box spanning [corner, corner + extents].
struct RectObstacle {
  Vec2 corner;
  Vec2 extents;
};

using Obstacle = std::variant<CircleObstacle, RectObstacle>;

/// Inclusive containment test against the exact shape.
bool contains(const Obstacle& obstacle, Vec2 p);

/// Robot-centered local window; both counts must be even.
struct SenseConfig {
  std::size_t height = 200;
  std::size_t width = 200;
  double cell_size = 0.01;
};

enum class ModelKind { SingleIntegrator, Unicycle };

/// An additional robot sharing the arena.
struct Agent {
  RobotState start;
  std::vector<Vec2> goals;
};

/// Obstacles drawn from a seed when the scenario is loaded.
struct RandomObstacleSpec {
  std::size_t count = 4;
  double circle_radius = 0.15;
  double rect_side = 0.2;
  double clearance = 0.35;  // kept free around start and goals, m
  std::uint64_t seed = 0;
};

struct Scenario {
  Vec2 arena{4.5, 4.5};  // width, height in m; the arena spans [0, w] x [0, h]
  std::vector<Obstacle> obstacles;
  RobotState start;
  std::vector<Vec2> goals;
  SenseConfig sense;
  SynthesisParams synthesis;
  FilterParams filter;
  NominalParams nominal;
  double dt = 0.05;
  ModelKind model = ModelKind::SingleIntegrator;
  DiffeoParams diffeo;
  std::size_t max_steps = 6000;
  std::vector<Agent> agents;  // extra robots for mutual avoidance
  std::optional<RandomObstacleSpec> random_obstacles;

  /// Throws ConfigError. Does not need a synthesized field.
  void validate() const;
};

Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Scenario& scn);
Scenario load_scenario(const std::filesystem::path& path);

/// Appends the obstacles described by random_obstacles (with an optional seed
/// override) and clears the spec. No-op without a spec.
void materialize_random_obstacles(Scenario& scn, std::optional<std::uint64_t> seed = {});

struct StepRecord {
  double t = 0.0;
  RobotState state;
  Vec2 control_point;  // where h is sampled: the center, or the look-ahead point
  double h = 0.0;
  Vec2 grad;
  ControlInput2D u_nom;
  ControlInput2D u;
  UnicycleCommand cmd;  // zero for the single integrator
  bool obstacle_free = false;
  bool constraint_active = false;
  bool degenerate = false;
  bool clamped = false;
  bool field_reused = false;
  std::size_t goal_index = 0;
  double assembly_ms = 0.0;
  double solve_ms = 0.0;
  double sampling_ms = 0.0;
  double filter_ms = 0.0;
  std::size_t iterations = 0;
  std::size_t n_unknowns = 0;
  std::size_t sensed_cells = 0;    // occupied in the local map as sensed
  std::size_t occupied_cells = 0;  // after robot-radius inflation

  double step_ms() const { return assembly_ms + solve_ms + sampling_ms + filter_ms; }
};

enum class Termination { AllGoalsReached, MaxSteps, SolverFailure };

std::string_view to_string(Termination t);

struct EpisodeLog {
  std::vector<StepRecord> steps;
  std::vector<double> goal_arrival_times;
  std::size_t goals_total = 0;
  RobotState final_state;
  Termination reason = Termination::MaxSteps;
};

struct Metrics {
  double min_h = 0.0;
  std::size_t collisions = 0;
  std::size_t goals_reached = 0;
  std::size_t goals_total = 0;
  std::size_t steps = 0;
  std::size_t synthesized_steps = 0;
  double mean_assembly_ms = 0.0;
  double max_assembly_ms = 0.0;
  double mean_solve_ms = 0.0;
  double max_solve_ms = 0.0;
  double mean_transition_cells = 0.0;
  double mean_sensed_cells = 0.0;
  double mean_occupied_cells = 0.0;
  Termination reason = Termination::MaxSteps;
};

/// Global raster at the sensing cell size; a cell is occupied when its center
/// lies inside an obstacle. Cell (0, 0) is centered at (cs/2, cs/2).
GridMap rasterize_world(const Scenario& scn);

/// Window of the global map centered on the cell containing p. Cells outside
/// the global map read as free; world coordinates are preserved.
GridMap sense_local(const GridMap& global, Vec2 p, const SenseConfig& cfg);

struct EpisodeHooks {
  /// Called with (agent, step, field) after every successful synthesis.
  std::function<void(std::size_t, std::size_t, const SafetyField&)> on_field;
};

/// Closed loop: sense, synthesize, sample h and its gradient, filter the
/// nominal command, integrate. Throws ConfigError before stepping when the
/// scenario is invalid or the start is not strictly safe.
EpisodeLog run_episode(const Scenario& scn, const EpisodeHooks& hooks = {});

/// Lock-step episode for the primary robot plus every entry in scn.agents.
/// Each robot sees the others as disks of the synthesis robot radius.
std::vector<EpisodeLog> run_multi_episode(const Scenario& scn, const EpisodeHooks& hooks = {});

Metrics metrics(const EpisodeLog& log, const Scenario& scn);
nlohmann::json to_json(const Metrics& m);

/// trajectory.csv, h_log.csv, timings.csv, metrics.json
void write_episode(const std::filesystem::path& dir, const EpisodeLog& log, const Metrics& m);

}  // namespace thermal_cbf
