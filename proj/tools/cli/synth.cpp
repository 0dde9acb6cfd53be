#include <fstream>
#include <ostream>

#include "cli/commands.hpp"
#include "thermal_cbf/error.hpp"
#include "thermal_cbf/log.hpp"

namespace thermal_cbf::cli {
namespace {

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << j.dump(2) << '\n';
}

}  // namespace

int cmd_synth(const SynthOptions& opts, std::ostream& out, std::ostream& err) {
  GridMap map(1, 1, 1.0);
  try {
    opts.params.validate();
    PgmOptions pgm;
    pgm.cell_size = opts.cell_size;
    pgm.origin = {opts.origin_x, opts.origin_y};
    pgm.occupied_threshold = opts.threshold;
    map = load_pgm(opts.map, pgm);
  } catch (const ParseError& e) {
    err << "error: " << opts.map.string() << ": " << e.what() << '\n';
    return kUsage;
  } catch (const ContractViolation& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  if (opts.system_prefix) {
    const GridMap inflated = inflate(map, opts.params.robot_radius_m);
    const RegionLabels labels =
        classify_regions(inflated, distance_transform(inflated), opts.params.delta_m);
    const LinearSystem sys = assemble(labels, index_unknowns(labels), opts.params.boundary);
    std::ofstream mtx(opts.system_prefix->string() + ".mtx");
    write_matrix_market(mtx, sys.matrix);
    std::ofstream rhs(opts.system_prefix->string() + ".rhs");
    write_vector(rhs, sys.rhs);
  }

  nlohmann::json stats = {{"map", opts.map.string()},
                          {"height", map.height()},
                          {"width", map.width()},
                          {"solver", std::string(to_string(opts.params.solver))},
                          {"tol", opts.params.solver_cfg.tol}};
  try {
    const SafetyField field = synthesize(map, opts.params);
    std::ofstream csv(opts.out);
    if (!csv) throw std::runtime_error("cannot write " + opts.out.string());
    write_field_csv(csv, field);
    stats.update(field_sidecar(field));
    stats["converged"] = true;
    stats["harmonic_residual"] = harmonic_residual(field);
    write_json(opts.stats, stats);
    out << "synthesized " << map.height() << "x" << map.width() << " field, N = "
        << field.stats().transition_cells << ", " << field.stats().solve.iterations
        << " iterations\n";
    return kOk;
  } catch (const SynthesisError& e) {
    stats["stats"] = to_json(e.stats());
    stats["converged"] = false;
    stats["error"] = e.what();
    write_json(opts.stats, stats);
    err << "error: " << e.what() << '\n';
    return kSolverFailure;
  } catch (const std::runtime_error& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
}

}  // namespace thermal_cbf::cli
