#include <cstdio>
#include <fstream>
#include <ostream>

#include "cli/commands.hpp"
#include "thermal_cbf/error.hpp"
#include "thermal_cbf/sim_harness.hpp"

namespace thermal_cbf::cli {

int cmd_simulate(const SimulateOptions& opts, std::ostream& out, std::ostream& err) {
  Scenario scn;
  try {
    scn = load_scenario(opts.scenario);
    materialize_random_obstacles(scn, opts.seed);
    scn.validate();
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  const bool multi = !scn.agents.empty();
  auto robot_dir = [&](std::size_t k) {
    return multi ? opts.out_dir / ("robot_" + std::to_string(k)) : opts.out_dir;
  };

  EpisodeHooks hooks;
  if (opts.dump_fields) {
    hooks.on_field = [&](std::size_t robot, std::size_t step, const SafetyField& field) {
      if (step % opts.dump_every != 0) return;
      const auto dir = robot_dir(robot) / "fields";
      std::filesystem::create_directories(dir);
      char name[32];
      std::snprintf(name, sizeof name, "field_%06zu", step);
      std::ofstream csv(dir / (std::string(name) + ".csv"));
      write_field_csv(csv, field);
      std::ofstream(dir / (std::string(name) + ".json")) << field_sidecar(field).dump(2) << '\n';
    };
  }

  std::vector<EpisodeLog> logs;
  try {
    logs = run_multi_episode(scn, hooks);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  std::filesystem::create_directories(opts.out_dir);
  std::ofstream(opts.out_dir / "scenario_resolved.json") << to_json(scn).dump(2) << '\n';

  bool success = true;
  for (std::size_t k = 0; k < logs.size(); ++k) {
    Scenario own = scn;
    const Metrics m = metrics(logs[k], own);
    write_episode(robot_dir(k), logs[k], m);
    success = success && m.collisions == 0 && m.goals_reached == m.goals_total;
    out << (multi ? "robot " + std::to_string(k) + ": " : std::string()) << m.goals_reached << "/"
        << m.goals_total << " goals, " << m.collisions << " collisions, min h = " << m.min_h
        << ", " << m.steps << " steps, mean N = " << m.mean_transition_cells
        << ", mean assembly " << m.mean_assembly_ms << " ms, mean solve " << m.mean_solve_ms
        << " ms (" << to_string(m.reason) << ")\n";
  }
  return success ? kOk : kMissionFailed;
}

}  // namespace thermal_cbf::cli
