#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "thermal_cbf/krylov.hpp"
#include "thermal_cbf/laplace_system.hpp"
#include "thermal_cbf/ogm.hpp"

namespace thermal_cbf {

struct SynthesisParams {
  BoundaryValues boundary{};
  double delta_m = 0.15;
  double robot_radius_m = 0.0;
  SolverKind solver = SolverKind::Gmres;
  SolverConfig solver_cfg{};

  void validate() const;
};

/// Wall-clock milliseconds per pipeline stage plus solver statistics.
struct SynthesisStats {
  double inflate_ms = 0.0;
  double distance_ms = 0.0;
  double classify_ms = 0.0;
  double assemble_ms = 0.0;  // unknown indexing + CSR assembly
  double solve_ms = 0.0;
  double scatter_ms = 0.0;
  std::size_t occupied_cells = 0;    // after inflation
  std::size_t transition_cells = 0;  // N
  SolveStats solve{};

  /// Everything that runs before the solver: the matrix-construction cost.
  double construction_ms() const { return inflate_ms + distance_ms + classify_ms + assemble_ms; }
};

/// Synthesized barrier function over a grid: -a on obstacles, b_val on safe
/// cells, harmonic in between. Immutable once built.
class SafetyField {
 public:
  SafetyField(Raster<double> h, RegionLabels labels, double cell_size, Vec2 origin,
              BoundaryValues boundary, double delta_m, SynthesisStats stats = {});

  std::size_t height() const noexcept { return h_.height(); }
  std::size_t width() const noexcept { return h_.width(); }
  double cell_size() const noexcept { return cell_size_; }
  Vec2 origin() const noexcept { return origin_; }
  const BoundaryValues& boundary() const noexcept { return boundary_; }
  double delta_m() const noexcept { return delta_m_; }
  const Raster<double>& values() const noexcept { return h_; }
  const RegionLabels& labels() const noexcept { return labels_; }
  const SynthesisStats& stats() const noexcept { return stats_; }

  /// True when p lies in the rectangle spanned by the cell centers.
  bool in_extent(Vec2 p) const noexcept;

 private:
  Raster<double> h_;
  RegionLabels labels_;
  double cell_size_;
  Vec2 origin_;
  BoundaryValues boundary_;
  double delta_m_;
  SynthesisStats stats_;
};

/// The solver did not reach its tolerance; stats describe the failed attempt.
class SynthesisError : public std::runtime_error {
 public:
  SynthesisError(const std::string& what, SynthesisStats stats)
      : std::runtime_error(what), stats_(stats) {}
  const SynthesisStats& stats() const noexcept { return stats_; }

 private:
  SynthesisStats stats_;
};

/// inflate -> distance transform -> classify -> index -> assemble -> solve.
/// Maps without occupied cells short-circuit to a constant b_val field.
SafetyField synthesize(const GridMap& map, const SynthesisParams& params);

/// Same pipeline from already classified labels (no inflation step).
SafetyField synthesize_from_labels(const RegionLabels& labels, double cell_size, Vec2 origin,
                                   const SynthesisParams& params);

/// Bilinear interpolation between the four surrounding cell centers.
double value_at(const SafetyField& field, Vec2 p);

/// Gradient of the bilinear interpolant used by value_at, in 1/m. Inside a
/// cell it blends the adjacent-cell differences; on a shared cell edge the
/// cell toward +x/+y is used.
Vec2 gradient_at(const SafetyField& field, Vec2 p);

/// Max over Transition cells of |4 h_ij - sum of 4-neighbors|, with off-map
/// neighbors read as b_val.
double harmonic_residual(const SafetyField& field);

/// H lines of W values formatted "%.9g".
void write_field_csv(std::ostream& out, const SafetyField& field);
/// {a, b, delta_m, cell_size, origin, height, width, stats}
nlohmann::json field_sidecar(const SafetyField& field);
nlohmann::json to_json(const SynthesisStats& stats);

}  // namespace thermal_cbf
