#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "cli/commands.hpp"
#include "thermal_cbf/krylov.hpp"
#include "thermal_cbf/map_generators.hpp"
#include "thermal_cbf/random.hpp"

namespace thermal_cbf::cli {
namespace {

constexpr double kSolverTol = 1e-10;
constexpr double kAgreement = 1e-6;

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

// 0 when the CSR arrays are well formed, symmetric, and follow the stencil
// pattern; otherwise 1.
double structure_defect(const LinearSystem& sys, const BoundaryValues& bv) {
  const auto& m = sys.matrix;
  if (m.row_ptr.size() != m.n + 1 || m.row_ptr.front() != 0) return 1.0;
  for (std::size_t i = 0; i < m.n; ++i) {
    if (m.row_ptr[i + 1] < m.row_ptr[i] || m.row_ptr[i + 1] - m.row_ptr[i] > 5) return 1.0;
    bool diag = false;
    for (std::size_t k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k) {
      const std::size_t j = m.col_idx[k];
      if (j >= m.n) return 1.0;
      if (k > m.row_ptr[i] && m.col_idx[k - 1] >= j) return 1.0;
      if (j == i) {
        diag = m.values[k] == 4.0;
      } else if (m.values[k] != -1.0 || m.at(j, i) != m.values[k]) {
        return 1.0;
      }
    }
    if (!diag) return 1.0;
    if (sys.rhs[i] < -4.0 * bv.a - 1e-12 || sys.rhs[i] > 4.0 * bv.b_val + 1e-12) return 1.0;
  }
  return 0.0;
}

void write_replay(const std::filesystem::path& path, const std::string& property, std::uint64_t seed,
                  std::size_t trial, const OracleCase& c, const BoundaryValues& bv, double worst) {
  std::ostringstream rows;
  write_csv(rows, c.map);
  nlohmann::json lines = nlohmann::json::array();
  std::string line;
  std::istringstream in(rows.str());
  while (std::getline(in, line)) lines.push_back(line);
  nlohmann::json j = {{"property", property},
                      {"seed", seed},
                      {"trial", trial},
                      {"trial_seed", derive_seed(seed, trial)},
                      {"delta_m", c.delta_m},
                      {"cell_size", c.map.cell_size()},
                      {"a", bv.a},
                      {"b", bv.b_val},
                      {"observed", worst},
                      {"map_csv", lines}};
  std::filesystem::create_directories(path.parent_path());
  std::ofstream(path) << j.dump(2) << '\n';
}

}  // namespace

bool VerifyReport::passed() const {
  return std::all_of(properties.begin(), properties.end(),
                     [](const PropertyResult& p) { return p.failures == 0; });
}

VerifyReport run_verify(const VerifyOptions& opts) {
  std::map<std::string, PropertyResult> results;
  std::vector<std::string> order;
  auto record = [&](const std::string& name, double observed, double bound) -> bool {
    auto [it, inserted] = results.try_emplace(name);
    if (inserted) order.push_back(name);
    PropertyResult& r = it->second;
    r.name = name;
    r.bound = bound;
    ++r.checked;
    r.worst = std::max(r.worst, observed);
    const bool ok = observed <= bound;
    if (!ok) ++r.failures;
    return ok;
  };

  VerifyReport report;
  SolverConfig cfg;
  cfg.tol = kSolverTol;

  for (std::size_t trial = 0; trial < opts.trials; ++trial) {
    Rng rng(derive_seed(opts.seed, trial));
    const OracleCase c = random_oracle_case(rng, 30);
    const BoundaryValues bv{rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0)};

    const RegionLabels labels = classify_regions(c.map, distance_transform(c.map), c.delta_m);
    const UnknownIndex index = index_unknowns(labels);
    LinearSystem sys = assemble(labels, index, bv);
    const std::size_t n = sys.size();
    if (n == 0 || n > opts.max_n) continue;
    if (opts.inject_assembly_bug) sys.rhs[n / 2] += 0.5 * (bv.a + bv.b_val);

    std::vector<std::pair<std::string, double>> failed;
    auto check = [&](const std::string& name, double observed, double bound) {
      if (!record(name, observed, bound)) failed.emplace_back(name, observed);
    };

    check("assembly_structure", structure_defect(sys, bv), 0.0);

    const std::vector<double> dense = dense_oracle_solve(sys, opts.max_n);
    std::vector<double> ax = spmv(sys.matrix, dense);
    double rhs_inf = 0.0;
    for (double v : sys.rhs) rhs_inf = std::max(rhs_inf, std::abs(v));
    check("dense_residual", max_abs_diff(ax, sys.rhs), 1e-10 * (4.0 + rhs_inf));

    const SolveResult g = gmres(sys, cfg);
    const SolveResult b = bicgstab(sys, cfg);
    const std::vector<double> jac = jacobi_oracle(sys, kSolverTol, 1000000);
    check("gmres_vs_dense", g.stats.converged ? max_abs_diff(g.solution, dense) : INFINITY, kAgreement);
    check("bicgstab_vs_dense", b.stats.converged ? max_abs_diff(b.solution, dense) : INFINITY, kAgreement);
    check("jacobi_vs_dense", max_abs_diff(jac, dense), kAgreement);

    // Field from the GMRES solution, checked against the stencil on the raster.
    Raster<double> h(labels.height(), labels.width(), bv.b_val);
    for (std::size_t k = 0; k < h.size(); ++k) {
      if (labels.label.data()[k] == Region::Obstacle) h.data()[k] = -bv.a;
    }
    for (std::size_t u = 0; u < n; ++u) h[index.cell_of(u)] = g.solution[u];
    const SafetyField field(std::move(h), labels, c.map.cell_size(), c.map.origin(), bv, c.delta_m);
    check("harmonic_residual", harmonic_residual(field), 1e-6 * (bv.a + bv.b_val));

    // Discrete maximum principle: inside [-a, b] everywhere, strictly inside
    // (with slack 10 tol) on components that touch both boundary values.
    const TransitionComponents comps = transition_components(labels);
    double violation = 0.0;
    const double slack = 10.0 * kSolverTol;
    for (std::size_t u = 0; u < n; ++u) {
      const Cell cell = index.cell_of(u);
      const double v = dense[u];
      const bool strict = comps.borders_both(comps.component[cell]);
      const double lo = strict ? -bv.a + slack : -bv.a - slack;
      const double hi = strict ? bv.b_val - slack : bv.b_val + slack;
      violation = std::max({violation, lo - v, v - hi});
    }
    check("maximum_principle", std::max(violation, 0.0), 0.0);

    for (const auto& [name, observed] : failed) {
      const auto path = opts.replay_dir / ("verify_failure_" + name + "_trial" + std::to_string(trial) + ".json");
      write_replay(path, name, opts.seed, trial, c, bv, observed);
      report.replay_files.push_back(path);
    }
  }

  for (const auto& name : order) report.properties.push_back(results[name]);
  return report;
}

nlohmann::json to_json(const VerifyReport& r) {
  nlohmann::json props = nlohmann::json::array();
  for (const auto& p : r.properties) {
    props.push_back({{"name", p.name},
                     {"checked", p.checked},
                     {"failures", p.failures},
                     {"worst", p.worst},
                     {"bound", p.bound},
                     {"passed", p.failures == 0}});
  }
  nlohmann::json replays = nlohmann::json::array();
  for (const auto& f : r.replay_files) replays.push_back(f.string());
  return {{"passed", r.passed()}, {"properties", props}, {"replay_files", replays}};
}

int cmd_verify(const VerifyOptions& opts, std::ostream& out, std::ostream& err) {
  const VerifyReport report = run_verify(opts);
  std::filesystem::create_directories(opts.replay_dir);
  std::ofstream(opts.replay_dir / "verify_report.json") << to_json(report).dump(2) << '\n';
  for (const auto& p : report.properties) {
    out << (p.failures == 0 ? "PASS " : "FAIL ") << p.name << ": " << p.checked << " instances, "
        << p.failures << " failures, worst " << p.worst << " (bound " << p.bound << ")\n";
  }
  if (!report.passed()) {
    for (const auto& f : report.replay_files) err << "replay instance written to " << f.string() << '\n';
    return kVerifyFailed;
  }
  return kOk;
}

}  // namespace thermal_cbf::cli
