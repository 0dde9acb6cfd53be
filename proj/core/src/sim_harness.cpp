#include "thermal_cbf/sim_harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "thermal_cbf/error.hpp"
#include "thermal_cbf/log.hpp"
#include "thermal_cbf/random.hpp"

namespace thermal_cbf {
namespace {

using Clock = std::chrono::steady_clock;
using nlohmann::json;

double ms_since(Clock::time_point& t) {
  const auto now = Clock::now();
  const double ms = std::chrono::duration<double, std::milli>(now - t).count();
  t = now;
  return ms;
}

struct Bounds {
  Vec2 lo, hi;
};

Bounds bounds_of(const Obstacle& o) {
  return std::visit(
      [](const auto& s) -> Bounds {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, CircleObstacle>) {
          return {{s.center.x - s.radius, s.center.y - s.radius},
                  {s.center.x + s.radius, s.center.y + s.radius}};
        } else {
          return {s.corner, s.corner + s.extents};
        }
      },
      o);
}

double distance_to(const Obstacle& o, Vec2 p) {
  return std::visit(
      [p](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, CircleObstacle>) {
          return std::max(0.0, norm(p - s.center) - s.radius);
        } else {
          const double dx = std::max({s.corner.x - p.x, 0.0, p.x - (s.corner.x + s.extents.x)});
          const double dy = std::max({s.corner.y - p.y, 0.0, p.y - (s.corner.y + s.extents.y)});
          return std::hypot(dx, dy);
        }
      },
      o);
}

bool inside_any(const std::vector<Obstacle>& obstacles, Vec2 p) {
  return std::any_of(obstacles.begin(), obstacles.end(),
                     [p](const Obstacle& o) { return contains(o, p); });
}

void stamp_disk(GridMap& map, Vec2 center, double radius) {
  const Cell c = map.cell_containing(center);
  const auto reach = static_cast<std::ptrdiff_t>(std::ceil(radius / map.cell_size())) + 1;
  for (std::ptrdiff_t i = c.row - reach; i <= c.row + reach; ++i) {
    for (std::ptrdiff_t j = c.col - reach; j <= c.col + reach; ++j) {
      if (!map.contains({i, j})) continue;
      if (norm(map.cell_center({i, j}) - center) <= radius) {
        map.set_occupied(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      }
    }
  }
}

Vec2 vec_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) throw ConfigError("expected a [x, y] pair, got " + j.dump());
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

json vec_to_json(Vec2 v) { return json::array({v.x, v.y}); }

RobotState state_from_json(const json& j) {
  return {j.at("x").get<double>(), j.at("y").get<double>(), j.value("theta", 0.0)};
}

json state_to_json(const RobotState& s) { return {{"x", s.x}, {"y", s.y}, {"theta", s.theta}}; }

std::vector<Vec2> goals_from_json(const json& j) {
  std::vector<Vec2> goals;
  for (const auto& g : j) goals.push_back(vec_from_json(g));
  return goals;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace

bool contains(const Obstacle& obstacle, Vec2 p) {
  return std::visit(
      [p](const auto& s) -> bool {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, CircleObstacle>) {
          const Vec2 d = p - s.center;
          return dot(d, d) <= s.radius * s.radius;
        } else {
          return p.x >= s.corner.x && p.x <= s.corner.x + s.extents.x && p.y >= s.corner.y &&
                 p.y <= s.corner.y + s.extents.y;
        }
      },
      obstacle);
}

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::AllGoalsReached:
      return "all_goals_reached";
    case Termination::MaxSteps:
      return "max_steps";
    case Termination::SolverFailure:
      return "solver_failure";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Scenario

void Scenario::validate() const {
  auto in_arena = [this](Vec2 p) {
    return p.x >= 0.0 && p.y >= 0.0 && p.x <= arena.x && p.y <= arena.y;
  };
  if (!(arena.x > 0.0) || !(arena.y > 0.0)) throw ConfigError("arena size must be positive");
  if (goals.empty()) throw ConfigError("scenario needs at least one goal");
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  if (sense.height < 2 || sense.width < 2 || sense.height % 2 || sense.width % 2) {
    throw ConfigError("local map dimensions must be even and at least 2");
  }
  if (!(sense.cell_size > 0.0)) throw ConfigError("sensing cell size must be positive");
  try {
    synthesis.validate();
    filter.validate();
    nominal.validate();
    if (model == ModelKind::Unicycle) diffeo.validate();
  } catch (const ContractViolation& e) {
    throw ConfigError(e.what());
  }
  for (const auto& o : obstacles) {
    const Bounds b = bounds_of(o);
    if (!in_arena(b.lo) || !in_arena(b.hi)) throw ConfigError("obstacle extends outside the arena");
  }
  auto check_robot = [&](const RobotState& s, const std::vector<Vec2>& g, const std::string& who) {
    if (!in_arena(s.position())) throw ConfigError(who + " start lies outside the arena");
    if (inside_any(obstacles, s.position())) throw ConfigError(who + " start lies inside an obstacle");
    if (g.empty()) throw ConfigError(who + " has no goals");
  };
  check_robot(start, goals, "robot");
  for (std::size_t k = 0; k < agents.size(); ++k) {
    check_robot(agents[k].start, agents[k].goals, "agent " + std::to_string(k + 1));
  }
}

Scenario scenario_from_json(const json& j) {
  try {
    Scenario s;
    const auto& arena = j.at("arena");
    s.arena = {arena.at("width").get<double>(), arena.at("height").get<double>()};
    for (const auto& o : j.value("obstacles", json::array())) {
      const auto type = o.at("type").get<std::string>();
      if (type == "circle") {
        s.obstacles.emplace_back(
            CircleObstacle{vec_from_json(o.at("center")), o.at("radius").get<double>()});
      } else if (type == "rectangle") {
        s.obstacles.emplace_back(
            RectObstacle{vec_from_json(o.at("corner")), vec_from_json(o.at("extents"))});
      } else {
        throw ConfigError("unknown obstacle type '" + type + "'");
      }
    }
    s.start = state_from_json(j.at("start"));
    s.goals = goals_from_json(j.at("goals"));
    if (j.contains("sense")) {
      const auto& c = j["sense"];
      s.sense.height = c.value("height", s.sense.height);
      s.sense.width = c.value("width", s.sense.width);
      s.sense.cell_size = c.value("cell_size", s.sense.cell_size);
    }
    if (j.contains("synthesis")) {
      const auto& c = j["synthesis"];
      s.synthesis.boundary.a = c.value("a", s.synthesis.boundary.a);
      s.synthesis.boundary.b_val = c.value("b", s.synthesis.boundary.b_val);
      s.synthesis.delta_m = c.value("delta_m", s.synthesis.delta_m);
      s.synthesis.robot_radius_m = c.value("robot_radius_m", s.synthesis.robot_radius_m);
      s.synthesis.solver = solver_from_string(c.value("solver", std::string("gmres")));
      s.synthesis.solver_cfg.tol = c.value("tol", s.synthesis.solver_cfg.tol);
      s.synthesis.solver_cfg.restart = c.value("restart", s.synthesis.solver_cfg.restart);
      if (c.contains("max_iters") && !c["max_iters"].is_null()) {
        s.synthesis.solver_cfg.max_iters = c["max_iters"].get<std::size_t>();
      }
    }
    if (j.contains("filter")) {
      const auto& c = j["filter"];
      s.filter.gamma = c.value("gamma", s.filter.gamma);
      s.filter.v_max = c.value("v_max", s.filter.v_max);
      s.filter.grad_eps = c.value("grad_eps", s.filter.grad_eps);
    }
    if (j.contains("nominal")) {
      const auto& c = j["nominal"];
      s.nominal.k = c.value("k", s.nominal.k);
      s.nominal.goal_eps = c.value("goal_eps", s.nominal.goal_eps);
    }
    s.dt = j.value("dt", s.dt);
    if (j.contains("model")) {
      const auto& m = j["model"];
      const auto type = m.at("type").get<std::string>();
      if (type == "single_integrator") {
        s.model = ModelKind::SingleIntegrator;
      } else if (type == "unicycle") {
        s.model = ModelKind::Unicycle;
        s.diffeo.r = m.value("r", s.diffeo.r);
      } else {
        throw ConfigError("unknown model type '" + type + "'");
      }
    }
    s.max_steps = j.value("max_steps", s.max_steps);
    for (const auto& a : j.value("agents", json::array())) {
      s.agents.push_back({state_from_json(a.at("start")), goals_from_json(a.at("goals"))});
    }
    if (j.contains("random_obstacles")) {
      const auto& c = j["random_obstacles"];
      RandomObstacleSpec r;
      r.count = c.value("count", r.count);
      r.circle_radius = c.value("circle_radius", r.circle_radius);
      r.rect_side = c.value("rect_side", r.rect_side);
      r.clearance = c.value("clearance", r.clearance);
      r.seed = c.value("seed", r.seed);
      s.random_obstacles = r;
    }
    return s;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed scenario: ") + e.what());
  } catch (const ContractViolation& e) {
    throw ConfigError(std::string("malformed scenario: ") + e.what());
  }
}

json to_json(const Scenario& s) {
  json obstacles = json::array();
  for (const auto& o : s.obstacles) {
    if (const auto* c = std::get_if<CircleObstacle>(&o)) {
      obstacles.push_back({{"type", "circle"}, {"center", vec_to_json(c->center)}, {"radius", c->radius}});
    } else {
      const auto& r = std::get<RectObstacle>(o);
      obstacles.push_back({{"type", "rectangle"},
                           {"corner", vec_to_json(r.corner)},
                           {"extents", vec_to_json(r.extents)}});
    }
  }
  auto goals_json = [](const std::vector<Vec2>& goals) {
    json g = json::array();
    for (const auto& p : goals) g.push_back(vec_to_json(p));
    return g;
  };
  json j = {
      {"arena", {{"width", s.arena.x}, {"height", s.arena.y}}},
      {"obstacles", obstacles},
      {"start", state_to_json(s.start)},
      {"goals", goals_json(s.goals)},
      {"sense", {{"height", s.sense.height}, {"width", s.sense.width}, {"cell_size", s.sense.cell_size}}},
      {"synthesis",
       {{"a", s.synthesis.boundary.a},
        {"b", s.synthesis.boundary.b_val},
        {"delta_m", s.synthesis.delta_m},
        {"robot_radius_m", s.synthesis.robot_radius_m},
        {"solver", std::string(to_string(s.synthesis.solver))},
        {"tol", s.synthesis.solver_cfg.tol},
        {"restart", s.synthesis.solver_cfg.restart},
        {"max_iters", s.synthesis.solver_cfg.max_iters ? json(*s.synthesis.solver_cfg.max_iters)
                                                       : json(nullptr)}}},
      {"filter", {{"gamma", s.filter.gamma}, {"v_max", s.filter.v_max}, {"grad_eps", s.filter.grad_eps}}},
      {"nominal", {{"k", s.nominal.k}, {"goal_eps", s.nominal.goal_eps}}},
      {"dt", s.dt},
      {"model", s.model == ModelKind::Unicycle ? json{{"type", "unicycle"}, {"r", s.diffeo.r}}
                                               : json{{"type", "single_integrator"}}},
      {"max_steps", s.max_steps},
  };
  if (!s.agents.empty()) {
    json agents = json::array();
    for (const auto& a : s.agents) {
      agents.push_back({{"start", state_to_json(a.start)}, {"goals", goals_json(a.goals)}});
    }
    j["agents"] = agents;
  }
  if (s.random_obstacles) {
    const auto& r = *s.random_obstacles;
    j["random_obstacles"] = {{"count", r.count},
                             {"circle_radius", r.circle_radius},
                             {"rect_side", r.rect_side},
                             {"clearance", r.clearance},
                             {"seed", r.seed}};
  }
  return j;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario is not valid JSON: ") + e.what());
  }
  return scenario_from_json(j);
}

void materialize_random_obstacles(Scenario& scn, std::optional<std::uint64_t> seed) {
  if (!scn.random_obstacles) return;
  const RandomObstacleSpec spec = *scn.random_obstacles;
  scn.random_obstacles.reset();
  Rng rng(seed.value_or(spec.seed));

  std::vector<Vec2> keep_clear{scn.start.position()};
  keep_clear.insert(keep_clear.end(), scn.goals.begin(), scn.goals.end());
  for (const auto& a : scn.agents) {
    keep_clear.push_back(a.start.position());
    keep_clear.insert(keep_clear.end(), a.goals.begin(), a.goals.end());
  }

  const double margin = 0.05;
  for (std::size_t k = 0; k < spec.count; ++k) {
    for (int attempt = 0; attempt < 1000; ++attempt) {
      Obstacle o;
      if (rng.bernoulli(0.5)) {
        const double r = spec.circle_radius;
        o = CircleObstacle{{rng.uniform(r + margin, scn.arena.x - r - margin),
                            rng.uniform(r + margin, scn.arena.y - r - margin)},
                           r};
      } else {
        const double side = spec.rect_side;
        o = RectObstacle{{rng.uniform(margin, scn.arena.x - side - margin),
                          rng.uniform(margin, scn.arena.y - side - margin)},
                         {side, side}};
      }
      const bool clear = std::all_of(keep_clear.begin(), keep_clear.end(), [&](Vec2 p) {
        return distance_to(o, p) >= spec.clearance;
      });
      if (clear) {
        scn.obstacles.push_back(o);
        break;
      }
    }
  }
}

// ---------------------------------------------------------------------------
// World and sensing

GridMap rasterize_world(const Scenario& scn) {
  const double cs = scn.sense.cell_size;
  for (const auto& o : scn.obstacles) {
    const Bounds b = bounds_of(o);
    if (b.lo.x < 0.0 || b.lo.y < 0.0 || b.hi.x > scn.arena.x || b.hi.y > scn.arena.y) {
      throw ConfigError("obstacle extends outside the arena");
    }
  }
  const auto w = static_cast<std::size_t>(std::ceil(scn.arena.x / cs - 1e-9));
  const auto h = static_cast<std::size_t>(std::ceil(scn.arena.y / cs - 1e-9));
  GridMap map(std::max<std::size_t>(h, 1), std::max<std::size_t>(w, 1), cs, {cs / 2, cs / 2});
  for (const auto& o : scn.obstacles) {
    const Bounds b = bounds_of(o);
    const Cell lo = map.cell_containing(b.lo);
    const Cell hi = map.cell_containing(b.hi);
    for (std::ptrdiff_t i = std::max<std::ptrdiff_t>(lo.row - 1, 0);
         i <= std::min<std::ptrdiff_t>(hi.row + 1, static_cast<std::ptrdiff_t>(map.height()) - 1); ++i) {
      for (std::ptrdiff_t j = std::max<std::ptrdiff_t>(lo.col - 1, 0);
           j <= std::min<std::ptrdiff_t>(hi.col + 1, static_cast<std::ptrdiff_t>(map.width()) - 1); ++j) {
        if (contains(o, map.cell_center({i, j}))) {
          map.set_occupied(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
        }
      }
    }
  }
  return map;
}

GridMap sense_local(const GridMap& global, Vec2 p, const SenseConfig& cfg) {
  const Cell center = global.cell_containing(p);
  const Cell first{center.row - static_cast<std::ptrdiff_t>(cfg.height / 2),
                   center.col - static_cast<std::ptrdiff_t>(cfg.width / 2)};
  GridMap local(cfg.height, cfg.width, global.cell_size(), global.cell_center(first));
  for (std::size_t i = 0; i < cfg.height; ++i) {
    const std::ptrdiff_t gi = first.row + static_cast<std::ptrdiff_t>(i);
    if (gi < 0 || gi >= static_cast<std::ptrdiff_t>(global.height())) continue;
    for (std::size_t j = 0; j < cfg.width; ++j) {
      const std::ptrdiff_t gj = first.col + static_cast<std::ptrdiff_t>(j);
      if (gj < 0 || gj >= static_cast<std::ptrdiff_t>(global.width())) continue;
      if (global.occupied(static_cast<std::size_t>(gi), static_cast<std::size_t>(gj))) {
        local.set_occupied(i, j);
      }
    }
  }
  return local;
}

// ---------------------------------------------------------------------------
// Closed loop

namespace {

struct RobotRun {
  RobotState state;
  std::vector<Vec2> goals;
  std::size_t goal_index = 0;
  bool done = false;
  std::optional<SafetyField> last_field;
  EpisodeLog log;
};

Vec2 control_point(const Scenario& scn, const RobotState& s) {
  return scn.model == ModelKind::Unicycle ? lookahead_point(s, scn.diffeo) : s.position();
}

}  // namespace

std::vector<EpisodeLog> run_multi_episode(const Scenario& input, const EpisodeHooks& hooks) {
  Scenario scn = input;
  materialize_random_obstacles(scn);
  scn.validate();
  const GridMap global = rasterize_world(scn);

  std::vector<RobotRun> robots;
  auto add_robot = [&robots](const RobotState& start, const std::vector<Vec2>& goals) {
    RobotRun& r = robots.emplace_back();
    r.state = start;
    r.goals = goals;
    r.log.goals_total = goals.size();
  };
  add_robot(scn.start, scn.goals);
  for (const auto& a : scn.agents) add_robot(a.start, a.goals);

  std::vector<std::optional<StepRecord>> pending(robots.size());
  for (std::size_t step = 0; step < scn.max_steps; ++step) {
    const double t = static_cast<double>(step) * scn.dt;

    // Every robot decides from the same snapshot of poses.
    for (std::size_t k = 0; k < robots.size(); ++k) {
      RobotRun& run = robots[k];
      pending[k].reset();
      if (run.done) continue;

      const Vec2 cp = control_point(scn, run.state);
      while (run.goal_index < run.goals.size() &&
             norm(run.goals[run.goal_index] - cp) < scn.nominal.goal_eps) {
        run.log.goal_arrival_times.push_back(t);
        ++run.goal_index;
      }
      if (run.goal_index == run.goals.size()) {
        run.done = true;
        run.log.reason = Termination::AllGoalsReached;
        continue;
      }

      StepRecord rec;
      rec.t = t;
      rec.state = run.state;
      rec.control_point = cp;
      rec.goal_index = run.goal_index;
      rec.u_nom = nominal_control(cp, run.goals[run.goal_index], scn.nominal);

      GridMap local = sense_local(global, cp, scn.sense);
      for (std::size_t other = 0; other < robots.size(); ++other) {
        if (other != k) {
          stamp_disk(local, robots[other].state.position(), scn.synthesis.robot_radius_m);
        }
      }

      rec.sensed_cells = local.occupied_count();
      if (rec.sensed_cells == 0) {
        rec.obstacle_free = true;
        rec.h = scn.synthesis.boundary.b_val;
        rec.u = rec.u_nom;
      } else {
        const SafetyField* field = nullptr;
        try {
          run.last_field.emplace(synthesize(local, scn.synthesis));
          field = &*run.last_field;
          const SynthesisStats& s = field->stats();
          rec.assembly_ms = s.construction_ms();
          rec.solve_ms = s.solve_ms + s.scatter_ms;
          rec.iterations = s.solve.iterations;
          rec.n_unknowns = s.transition_cells;
          rec.occupied_cells = s.occupied_cells;
          if (hooks.on_field) hooks.on_field(k, step, *field);
        } catch (const SynthesisError& e) {
          const SynthesisStats& s = e.stats();
          rec.assembly_ms = s.construction_ms();
          rec.solve_ms = s.solve_ms;
          rec.iterations = s.solve.iterations;
          rec.n_unknowns = s.transition_cells;
          if (run.last_field && run.last_field->in_extent(cp)) {
            logger().warn("robot {} step {}: {}; reusing previous field", k, step, e.what());
            field = &*run.last_field;
            rec.field_reused = true;
          } else {
            logger().error("robot {} step {}: {}; no usable previous field", k, step, e.what());
            run.done = true;
            run.log.reason = Termination::SolverFailure;
            continue;
          }
        }

        auto tick = Clock::now();
        rec.h = value_at(*field, cp);
        rec.grad = gradient_at(*field, cp);
        rec.sampling_ms = ms_since(tick);
        if (step == 0 && !(rec.h > 0.0)) {
          throw ConfigError("start position is not strictly safe (h = " + fmt(rec.h) + ")");
        }
        const FilterOutcome out = filter(rec.u_nom, rec.h, rec.grad, scn.filter);
        rec.filter_ms = ms_since(tick);
        rec.u = out.u;
        rec.constraint_active = out.constraint_active;
        rec.degenerate = out.degenerate;
        rec.clamped = out.clamped;
      }
      if (scn.model == ModelKind::Unicycle) {
        rec.cmd = unicycle_from_velocity(run.state.theta, rec.u, scn.diffeo);
      }
      pending[k] = rec;
    }

    bool any_active = false;
    for (std::size_t k = 0; k < robots.size(); ++k) {
      if (!pending[k]) continue;
      RobotRun& run = robots[k];
      if (scn.model == ModelKind::Unicycle) {
        run.state = integrate_unicycle(run.state, pending[k]->cmd, scn.dt);
      } else {
        const Vec2 p = integrate_single(run.state.position(), pending[k]->u, scn.dt);
        run.state.x = p.x;
        run.state.y = p.y;
      }
      run.log.steps.push_back(*pending[k]);
      any_active = true;
    }
    if (!any_active) break;
  }

  std::vector<EpisodeLog> logs;
  for (auto& r : robots) {
    r.log.final_state = r.state;
    if (!r.done) {
      // the last integration may have landed on the final goal
      const Vec2 cp = control_point(scn, r.state);
      while (r.goal_index < r.goals.size() &&
             norm(r.goals[r.goal_index] - cp) < scn.nominal.goal_eps) {
        r.log.goal_arrival_times.push_back(static_cast<double>(scn.max_steps) * scn.dt);
        ++r.goal_index;
      }
      if (r.goal_index == r.goals.size()) r.log.reason = Termination::AllGoalsReached;
    }
    logs.push_back(std::move(r.log));
  }
  return logs;
}

EpisodeLog run_episode(const Scenario& scn, const EpisodeHooks& hooks) {
  Scenario single = scn;
  single.agents.clear();
  return std::move(run_multi_episode(single, hooks).front());
}

Metrics metrics(const EpisodeLog& log, const Scenario& input) {
  Scenario scn = input;
  materialize_random_obstacles(scn);
  Metrics m;
  m.goals_total = log.goals_total;
  m.goals_reached = log.goal_arrival_times.size();
  m.reason = log.reason;
  m.steps = log.steps.size();
  m.min_h = std::numeric_limits<double>::infinity();
  double assembly_sum = 0.0, solve_sum = 0.0, n_sum = 0.0, occ_sum = 0.0, sensed_sum = 0.0;
  for (const auto& s : log.steps) {
    m.min_h = std::min(m.min_h, s.h);
    if (inside_any(scn.obstacles, s.state.position())) ++m.collisions;
    if (!s.obstacle_free && !s.field_reused) {
      ++m.synthesized_steps;
      assembly_sum += s.assembly_ms;
      solve_sum += s.solve_ms;
      n_sum += static_cast<double>(s.n_unknowns);
      occ_sum += static_cast<double>(s.occupied_cells);
      sensed_sum += static_cast<double>(s.sensed_cells);
      m.max_assembly_ms = std::max(m.max_assembly_ms, s.assembly_ms);
      m.max_solve_ms = std::max(m.max_solve_ms, s.solve_ms);
    }
  }
  if (inside_any(scn.obstacles, log.final_state.position())) ++m.collisions;
  if (log.steps.empty()) m.min_h = scn.synthesis.boundary.b_val;
  if (m.synthesized_steps > 0) {
    const auto n = static_cast<double>(m.synthesized_steps);
    m.mean_assembly_ms = assembly_sum / n;
    m.mean_solve_ms = solve_sum / n;
    m.mean_transition_cells = n_sum / n;
    m.mean_occupied_cells = occ_sum / n;
    m.mean_sensed_cells = sensed_sum / n;
  }
  return m;
}

json to_json(const Metrics& m) {
  return {
      {"min_h", m.min_h},
      {"collisions", m.collisions},
      {"goals_reached", m.goals_reached},
      {"goals_total", m.goals_total},
      {"steps", m.steps},
      {"synthesized_steps", m.synthesized_steps},
      {"mean_assembly_ms", m.mean_assembly_ms},
      {"max_assembly_ms", m.max_assembly_ms},
      {"mean_solve_ms", m.mean_solve_ms},
      {"max_solve_ms", m.max_solve_ms},
      {"mean_transition_cells", m.mean_transition_cells},
      {"mean_sensed_cells", m.mean_sensed_cells},
      {"mean_occupied_cells", m.mean_occupied_cells},
      {"termination", std::string(to_string(m.reason))},
  };
}

void write_episode(const std::filesystem::path& dir, const EpisodeLog& log, const Metrics& m) {
  std::filesystem::create_directories(dir);
  std::ofstream traj(dir / "trajectory.csv");
  std::ofstream hlog(dir / "h_log.csv");
  std::ofstream timings(dir / "timings.csv");
  traj << "t,x,y,theta,vx,vy,h\n";
  hlog << "t,h\n";
  timings << "t,assembly_ms,solve_ms,iterations,n_unknowns\n";
  for (const auto& s : log.steps) {
    traj << fmt(s.t) << ',' << fmt(s.state.x) << ',' << fmt(s.state.y) << ',' << fmt(s.state.theta)
         << ',' << fmt(s.u.x) << ',' << fmt(s.u.y) << ',' << fmt(s.h) << '\n';
    hlog << fmt(s.t) << ',' << fmt(s.h) << '\n';
    timings << fmt(s.t) << ',' << fmt(s.assembly_ms) << ',' << fmt(s.solve_ms) << ','
            << s.iterations << ',' << s.n_unknowns << '\n';
  }
  std::ofstream(dir / "metrics.json") << to_json(m).dump(2) << '\n';
}

}  // namespace thermal_cbf
