#include "thermal_cbf/cbf_field.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "thermal_cbf/error.hpp"

namespace thermal_cbf {
namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point& t) {
  const auto now = Clock::now();
  const double ms = std::chrono::duration<double, std::milli>(now - t).count();
  t = now;
  return ms;
}

// Continuous cell coordinates of p, with the base corner of the enclosing
// interpolation cell and the fractional offsets.
struct Stencil {
  std::size_t i0, j0, i1, j1;
  double fx, fy;
};

Stencil locate(const SafetyField& f, Vec2 p) {
  if (!f.in_extent(p)) {
    throw OutOfBounds("sample point (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                      ") lies outside the field extent");
  }
  const double u = std::clamp((p.x - f.origin().x) / f.cell_size(), 0.0,
                              static_cast<double>(f.width() - 1));
  const double v = std::clamp((p.y - f.origin().y) / f.cell_size(), 0.0,
                              static_cast<double>(f.height() - 1));
  Stencil s{};
  s.j0 = f.width() > 1 ? std::min(static_cast<std::size_t>(u), f.width() - 2) : 0;
  s.i0 = f.height() > 1 ? std::min(static_cast<std::size_t>(v), f.height() - 2) : 0;
  s.j1 = std::min(s.j0 + 1, f.width() - 1);
  s.i1 = std::min(s.i0 + 1, f.height() - 1);
  s.fx = u - static_cast<double>(s.j0);
  s.fy = v - static_cast<double>(s.i0);
  return s;
}

}  // namespace

void SynthesisParams::validate() const {
  if (!(boundary.a > 0.0) || !(boundary.b_val > 0.0)) {
    throw ContractViolation("boundary values a and b must be positive");
  }
  if (!(delta_m > 0.0)) throw ContractViolation("safety margin delta must be positive");
  if (!(robot_radius_m >= 0.0)) throw ContractViolation("robot radius must be non-negative");
  solver_cfg.validate();
}

SafetyField::SafetyField(Raster<double> h, RegionLabels labels, double cell_size, Vec2 origin,
                         BoundaryValues boundary, double delta_m, SynthesisStats stats)
    : h_(std::move(h)),
      labels_(std::move(labels)),
      cell_size_(cell_size),
      origin_(origin),
      boundary_(boundary),
      delta_m_(delta_m),
      stats_(stats) {
  if (h_.height() != labels_.height() || h_.width() != labels_.width()) {
    throw ContractViolation("field raster and labels differ in size");
  }
}

bool SafetyField::in_extent(Vec2 p) const noexcept {
  const double slack = 1e-9 * cell_size_;
  const double max_x = origin_.x + static_cast<double>(width() - 1) * cell_size_;
  const double max_y = origin_.y + static_cast<double>(height() - 1) * cell_size_;
  return p.x >= origin_.x - slack && p.x <= max_x + slack && p.y >= origin_.y - slack &&
         p.y <= max_y + slack;
}

namespace {

SafetyField solve_on_labels(RegionLabels labels, double cell_size, Vec2 origin,
                            const SynthesisParams& params, SynthesisStats stats) {
  auto t = Clock::now();
  const UnknownIndex index = index_unknowns(labels);
  const LinearSystem sys = assemble(labels, index, params.boundary);
  stats.assemble_ms = ms_since(t);
  stats.transition_cells = index.count();
  stats.occupied_cells = labels.count(Region::Obstacle);

  Raster<double> h(labels.height(), labels.width(), params.boundary.b_val);
  for (std::size_t k = 0; k < h.size(); ++k) {
    if (labels.label.data()[k] == Region::Obstacle) h.data()[k] = -params.boundary.a;
  }
  if (index.count() == 0) {
    stats.solve.converged = true;
  } else {
    const SolveResult res = solve(sys, params.solver, params.solver_cfg);
    stats.solve = res.stats;
    stats.solve_ms = ms_since(t);
    if (!res.stats.converged) {
      throw SynthesisError("solver did not converge (relative residual " +
                               std::to_string(res.stats.final_relative_residual) + " after " +
                               std::to_string(res.stats.iterations) + " iterations)",
                           stats);
    }
    for (std::size_t u = 0; u < index.count(); ++u) h[index.cell_of(u)] = res.solution[u];
    stats.scatter_ms = ms_since(t);
  }
  return SafetyField(std::move(h), std::move(labels), cell_size, origin, params.boundary,
                     params.delta_m, stats);
}

}  // namespace

SafetyField synthesize_from_labels(const RegionLabels& labels, double cell_size, Vec2 origin,
                                   const SynthesisParams& params) {
  params.validate();
  return solve_on_labels(labels, cell_size, origin, params, {});
}

SafetyField synthesize(const GridMap& map, const SynthesisParams& params) {
  params.validate();
  if (map.occupied_count() == 0) {
    SynthesisStats stats;
    stats.solve.converged = true;
    RegionLabels labels{Raster<Region>(map.height(), map.width(), Region::Safe)};
    return SafetyField(Raster<double>(map.height(), map.width(), params.boundary.b_val),
                       std::move(labels), map.cell_size(), map.origin(), params.boundary,
                       params.delta_m, stats);
  }

  SynthesisStats stats;
  auto t = Clock::now();
  const GridMap inflated = inflate(map, params.robot_radius_m);
  stats.inflate_ms = ms_since(t);
  const DistanceField dist = distance_transform(inflated);
  stats.distance_ms = ms_since(t);
  RegionLabels labels = classify_regions(inflated, dist, params.delta_m);
  stats.classify_ms = ms_since(t);
  return solve_on_labels(std::move(labels), map.cell_size(), map.origin(), params, stats);
}

double value_at(const SafetyField& field, Vec2 p) {
  const Stencil s = locate(field, p);
  const auto& h = field.values();
  const double bottom = (1.0 - s.fx) * h(s.i0, s.j0) + s.fx * h(s.i0, s.j1);
  const double top = (1.0 - s.fx) * h(s.i1, s.j0) + s.fx * h(s.i1, s.j1);
  return (1.0 - s.fy) * bottom + s.fy * top;
}

Vec2 gradient_at(const SafetyField& field, Vec2 p) {
  const Stencil s = locate(field, p);
  const auto& h = field.values();
  const double cs = field.cell_size();
  Vec2 g{};
  if (s.j1 != s.j0) {
    const double d0 = h(s.i0, s.j1) - h(s.i0, s.j0);
    const double d1 = h(s.i1, s.j1) - h(s.i1, s.j0);
    g.x = ((1.0 - s.fy) * d0 + s.fy * d1) / cs;
  }
  if (s.i1 != s.i0) {
    const double d0 = h(s.i1, s.j0) - h(s.i0, s.j0);
    const double d1 = h(s.i1, s.j1) - h(s.i0, s.j1);
    g.y = ((1.0 - s.fx) * d0 + s.fx * d1) / cs;
  }
  return g;
}

double harmonic_residual(const SafetyField& field) {
  static constexpr std::ptrdiff_t kDr[4] = {-1, 0, 0, 1};
  static constexpr std::ptrdiff_t kDc[4] = {0, -1, 1, 0};
  const auto& h = field.values();
  const auto& lab = field.labels().label;
  double worst = 0.0;
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(h.height()); ++i) {
    for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(h.width()); ++j) {
      if (lab(i, j) != Region::Transition) continue;
      double s = 4.0 * h(i, j);
      for (int k = 0; k < 4; ++k) {
        const Cell n{i + kDr[k], j + kDc[k]};
        s -= h.contains(n) ? h[n] : field.boundary().b_val;
      }
      worst = std::max(worst, std::abs(s));
    }
  }
  return worst;
}

void write_field_csv(std::ostream& out, const SafetyField& field) {
  char buf[32];
  const auto& h = field.values();
  for (std::size_t i = 0; i < h.height(); ++i) {
    for (std::size_t j = 0; j < h.width(); ++j) {
      if (j) out << ',';
      std::snprintf(buf, sizeof buf, "%.9g", h(i, j));
      out << buf;
    }
    out << '\n';
  }
}

nlohmann::json to_json(const SynthesisStats& s) {
  return {
      {"inflate_ms", s.inflate_ms},
      {"distance_ms", s.distance_ms},
      {"classify_ms", s.classify_ms},
      {"assemble_ms", s.assemble_ms},
      {"construction_ms", s.construction_ms()},
      {"solve_ms", s.solve_ms},
      {"scatter_ms", s.scatter_ms},
      {"occupied_cells", s.occupied_cells},
      {"transition_cells", s.transition_cells},
      {"iterations", s.solve.iterations},
      {"final_relative_residual", s.solve.final_relative_residual},
      {"converged", s.solve.converged},
      {"solver_wall_time_s", s.solve.wall_time_s},
  };
}

nlohmann::json field_sidecar(const SafetyField& field) {
  return {
      {"a", field.boundary().a},
      {"b", field.boundary().b_val},
      {"delta_m", field.delta_m()},
      {"cell_size", field.cell_size()},
      {"origin", {field.origin().x, field.origin().y}},
      {"height", field.height()},
      {"width", field.width()},
      {"stats", to_json(field.stats())},
  };
}

}  // namespace thermal_cbf
