#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <ostream>

#include "cli/commands.hpp"
#include "thermal_cbf/map_generators.hpp"
#include "thermal_cbf/random.hpp"

namespace thermal_cbf::cli {

StageSummary summarize(std::vector<double> values) {
  StageSummary s;
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  s.median = n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
  // nearest-rank percentile
  const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(n)));
  s.p95 = values[std::max<std::size_t>(rank, 1) - 1];
  return s;
}

BenchReport run_bench(const BenchOptions& opts) {
  BenchReport report;
  SynthesisParams params;
  params.delta_m = opts.delta_m;
  params.robot_radius_m = opts.robot_radius_m;
  params.solver = opts.solver;
  params.solver_cfg.tol = opts.tol;

  BenchMapSpec spec;
  spec.size = opts.size;
  spec.cell_size = opts.cell_size;
  spec.obstacles = opts.obstacles;
  spec.delta_m = opts.delta_m;

  std::vector<double> assembly, solve, total, occupied, transition, iterations;
  for (std::size_t trial = 0; trial < opts.trials; ++trial) {
    Rng rng(derive_seed(opts.seed, trial));
    const GridMap map = random_bench_map(spec, rng);

    BenchRow row;
    row.trial = trial;
    row.map_size = opts.size;
    row.solver = std::string(to_string(opts.solver));
    SynthesisStats st;
    try {
      st = synthesize(map, params).stats();
      row.converged = true;
    } catch (const SynthesisError& e) {
      st = e.stats();
      row.converged = false;
    }
    row.occupied_cells = map.occupied_count();
    row.transition_cells = st.transition_cells;
    row.assembly_ms = st.construction_ms();
    row.solve_ms = st.solve_ms + st.scatter_ms;
    row.iterations = st.solve.iterations;
    report.rows.push_back(row);

    assembly.push_back(row.assembly_ms);
    solve.push_back(row.solve_ms);
    total.push_back(row.assembly_ms + row.solve_ms);
    occupied.push_back(static_cast<double>(row.occupied_cells));
    transition.push_back(static_cast<double>(row.transition_cells));
    iterations.push_back(static_cast<double>(row.iterations));
  }
  report.assembly_ms = summarize(assembly);
  report.solve_ms = summarize(solve);
  report.total_ms = summarize(total);
  report.occupied_cells = summarize(occupied);
  report.transition_cells = summarize(transition);
  report.iterations = summarize(iterations);
  return report;
}

namespace {

nlohmann::json stage_json(const StageSummary& s) {
  return {{"median", s.median}, {"mean", s.mean}, {"p95", s.p95}};
}

}  // namespace

nlohmann::json to_json(const BenchReport& r, const BenchOptions& opts) {
  const auto converged = std::count_if(r.rows.begin(), r.rows.end(),
                                       [](const BenchRow& row) { return row.converged; });
  return {
      {"trials", r.rows.size()},
      {"converged", converged},
      {"size", opts.size},
      {"obstacles", opts.obstacles},
      {"solver", std::string(to_string(opts.solver))},
      {"seed", opts.seed},
      {"cell_size", opts.cell_size},
      {"delta_m", opts.delta_m},
      {"tol", opts.tol},
      {"assembly_ms", stage_json(r.assembly_ms)},
      {"solve_ms", stage_json(r.solve_ms)},
      {"total_ms", stage_json(r.total_ms)},
      {"occupied_cells", stage_json(r.occupied_cells)},
      {"transition_cells", stage_json(r.transition_cells)},
      {"iterations", stage_json(r.iterations)},
      // Simulation averages this benchmark is meant to be compared with.
      {"reference",
       {{"occupied_cells", 1627.95},
        {"transition_cells", 6962.60},
        {"assembly_ms", 4.98},
        {"solve_ms", 4.33},
        {"total_ms", 9.31}}},
  };
}

int cmd_bench(const BenchOptions& opts, std::ostream& out, std::ostream& err) {
  if (opts.trials == 0) {
    err << "error: --trials must be at least 1\n";
    return kUsage;
  }
  const BenchReport report = run_bench(opts);

  std::ofstream csv(opts.csv);
  if (!csv) {
    err << "error: cannot write " << opts.csv.string() << '\n';
    return kUsage;
  }
  csv << "trial,map_size,occupied_cells,transition_cells,assembly_ms,solve_ms,iterations,solver,"
         "converged\n";
  for (const auto& row : report.rows) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%zu,%zu,%zu,%zu,%.6f,%.6f,%zu,%s,%d\n", row.trial, row.map_size,
                  row.occupied_cells, row.transition_cells, row.assembly_ms, row.solve_ms,
                  row.iterations, row.solver.c_str(), row.converged ? 1 : 0);
    csv << buf;
  }
  std::ofstream(opts.summary) << to_json(report, opts).dump(2) << '\n';

  char line[512];
  std::snprintf(line, sizeof line,
                "%zu trials, %s: occupied median %.0f, N median %.0f (reference 6962.60)\n"
                "  assembly median %.3f ms (reference 4.98), solve median %.3f ms (reference 4.33)\n"
                "  total median %.3f ms, p95 %.3f ms (reference 9.31)\n",
                report.rows.size(), std::string(to_string(opts.solver)).c_str(),
                report.occupied_cells.median, report.transition_cells.median,
                report.assembly_ms.median, report.solve_ms.median, report.total_ms.median,
                report.total_ms.p95);
  out << line;
  return kOk;
}

}  // namespace thermal_cbf::cli
