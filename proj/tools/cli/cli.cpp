#include <ostream>
#include <string>

#include <CLI11.hpp>

#include "cli/commands.hpp"

namespace thermal_cbf::cli {

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Thermal-field control barrier functions: synthesis, simulation, benchmarks"};
  app.require_subcommand(1);

  SynthOptions synth;
  std::string synth_solver = "gmres";
  std::optional<std::size_t> synth_max_iters;
  auto* synth_cmd = app.add_subcommand("synth", "Synthesize a safety field from a PGM map");
  synth_cmd->add_option("--map", synth.map, "Input map (P2/P5 PGM)")->required()->check(CLI::ExistingFile);
  synth_cmd->add_option("--cell-size", synth.cell_size, "Meters per cell")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--origin-x", synth.origin_x, "World x of the center of cell (0,0)");
  synth_cmd->add_option("--origin-y", synth.origin_y, "World y of the center of cell (0,0)");
  synth_cmd->add_option("--threshold", synth.threshold, "Pixels below this are occupied (default maxval/2)");
  synth_cmd->add_option("--a", synth.params.boundary.a, "Obstacle temperature magnitude")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--b", synth.params.boundary.b_val, "Safe temperature")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--delta", synth.params.delta_m, "Safety margin, m")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--robot-radius", synth.params.robot_radius_m, "Inflation radius, m")->check(CLI::NonNegativeNumber);
  synth_cmd->add_option("--solver", synth_solver, "gmres or bicgstab")->check(CLI::IsMember({"gmres", "bicgstab"}));
  synth_cmd->add_option("--tol", synth.params.solver_cfg.tol, "Relative residual target")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--max-iters", synth_max_iters, "Iteration cap (default min(10N, 20000))");
  synth_cmd->add_option("--restart", synth.params.solver_cfg.restart, "GMRES restart length")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--out", synth.out, "Field CSV output")->required();
  synth_cmd->add_option("--stats", synth.stats, "Stats JSON output")->required();
  synth_cmd->add_option("--dump-system", synth.system_prefix, "Write <prefix>.mtx and <prefix>.rhs");

  SimulateOptions sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Run a closed-loop navigation episode");
  sim_cmd->add_option("--scenario", sim.scenario, "Scenario JSON")->required();
  sim_cmd->add_option("--out-dir", sim.out_dir, "Episode output directory")->required();
  sim_cmd->add_option("--seed", sim.seed, "Seed for randomized obstacles");
  sim_cmd->add_flag("--dump-fields", sim.dump_fields, "Write every synthesized field");
  sim_cmd->add_option("--dump-every", sim.dump_every, "Field dump stride in steps")->check(CLI::PositiveNumber);

  BenchOptions bench;
  std::string bench_solver = "bicgstab";
  auto* bench_cmd = app.add_subcommand("bench", "Time synthesis on random local maps");
  bench_cmd->add_option("--size", bench.size, "Map side in cells")->check(CLI::Range(8, 4096));
  bench_cmd->add_option("--obstacles", bench.obstacles, "Shapes per map");
  bench_cmd->add_option("--trials", bench.trials, "Number of maps")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--solver", bench_solver, "gmres or bicgstab")->check(CLI::IsMember({"gmres", "bicgstab"}));
  bench_cmd->add_option("--seed", bench.seed, "Base seed");
  bench_cmd->add_option("--cell-size", bench.cell_size, "Meters per cell")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--delta", bench.delta_m, "Safety margin, m")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--robot-radius", bench.robot_radius_m, "Inflation radius, m")->check(CLI::NonNegativeNumber);
  bench_cmd->add_option("--tol", bench.tol, "Relative residual target")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--out", bench.csv, "Per-trial CSV");
  bench_cmd->add_option("--summary", bench.summary, "Summary JSON");

  VerifyOptions verify;
  auto* verify_cmd = app.add_subcommand("verify", "Run the oracle property sweeps");
  verify_cmd->add_option("--max-n", verify.max_n, "Dense oracle cap")->check(CLI::PositiveNumber);
  verify_cmd->add_option("--trials", verify.trials, "Random maps per sweep")->check(CLI::PositiveNumber);
  verify_cmd->add_option("--seed", verify.seed, "Base seed");
  verify_cmd->add_option("--replay-dir", verify.replay_dir, "Where reports and failing instances go");
  verify_cmd->add_flag("--inject-assembly-bug", verify.inject_assembly_bug)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const CLI::App* failing = &app;
    for (const auto* sub : app.get_subcommands()) failing = sub;
    err << failing->help();
    return kUsage;
  }

  if (*synth_cmd) {
    synth.params.solver = solver_from_string(synth_solver);
    synth.params.solver_cfg.max_iters = synth_max_iters;
    return cmd_synth(synth, out, err);
  }
  if (*sim_cmd) return cmd_simulate(sim, out, err);
  if (*bench_cmd) {
    bench.solver = solver_from_string(bench_solver);
    return cmd_bench(bench, out, err);
  }
  return cmd_verify(verify, out, err);
}

}  // namespace thermal_cbf::cli
