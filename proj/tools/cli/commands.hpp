#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "thermal_cbf/cbf_field.hpp"

namespace thermal_cbf::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kSolverFailure = 3,
  kMissionFailed = 4,
  kVerifyFailed = 5,
};

/// Parses argv (argv[0] is the program name) and dispatches to a subcommand.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// --- synth -----------------------------------------------------------------

struct SynthOptions {
  std::filesystem::path map;
  double cell_size = 0.01;
  double origin_x = 0.0;
  double origin_y = 0.0;
  std::optional<double> threshold;
  SynthesisParams params;
  std::filesystem::path out;
  std::filesystem::path stats;
  std::optional<std::filesystem::path> system_prefix;  // writes <prefix>.mtx and <prefix>.rhs
};

int cmd_synth(const SynthOptions& opts, std::ostream& out, std::ostream& err);

// --- simulate --------------------------------------------------------------

struct SimulateOptions {
  std::filesystem::path scenario;
  std::filesystem::path out_dir;
  std::optional<std::uint64_t> seed;
  bool dump_fields = false;
  std::size_t dump_every = 1;
};

int cmd_simulate(const SimulateOptions& opts, std::ostream& out, std::ostream& err);

// --- bench -----------------------------------------------------------------

struct BenchOptions {
  std::size_t size = 200;
  std::size_t obstacles = 4;
  std::size_t trials = 50;
  SolverKind solver = SolverKind::Bicgstab;
  std::uint64_t seed = 1;
  double cell_size = 0.01;
  double delta_m = 0.15;
  double robot_radius_m = 0.0;
  double tol = 1e-8;
  std::filesystem::path csv = "bench.csv";
  std::filesystem::path summary = "bench_summary.json";
};

struct BenchRow {
  std::size_t trial = 0;
  std::size_t map_size = 0;
  std::size_t occupied_cells = 0;
  std::size_t transition_cells = 0;
  double assembly_ms = 0.0;
  double solve_ms = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  std::string solver;
};

struct StageSummary {
  double median = 0.0;
  double mean = 0.0;
  double p95 = 0.0;
};

struct BenchReport {
  std::vector<BenchRow> rows;
  StageSummary assembly_ms;
  StageSummary solve_ms;
  StageSummary total_ms;
  StageSummary occupied_cells;
  StageSummary transition_cells;
  StageSummary iterations;
};

StageSummary summarize(std::vector<double> values);
BenchReport run_bench(const BenchOptions& opts);
nlohmann::json to_json(const BenchReport& report, const BenchOptions& opts);
int cmd_bench(const BenchOptions& opts, std::ostream& out, std::ostream& err);

// --- verify ----------------------------------------------------------------

struct VerifyOptions {
  std::size_t max_n = 2000;
  std::size_t trials = 50;
  std::uint64_t seed = 7;
  std::filesystem::path replay_dir = ".";
  bool inject_assembly_bug = false;  // test hook
};

struct PropertyResult {
  std::string name;
  std::size_t checked = 0;
  std::size_t failures = 0;
  double worst = 0.0;  // largest observed error for the property
  double bound = 0.0;
};

struct VerifyReport {
  std::vector<PropertyResult> properties;
  std::vector<std::filesystem::path> replay_files;

  bool passed() const;
};

VerifyReport run_verify(const VerifyOptions& opts);
nlohmann::json to_json(const VerifyReport& report);
int cmd_verify(const VerifyOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace thermal_cbf::cli
