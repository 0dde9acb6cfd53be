#pragma once

#include "thermal_cbf/geometry.hpp"

namespace thermal_cbf {

/// Planar velocity command (vx, vy) in m/s.
using ControlInput2D = Vec2;

struct FilterParams {
  double gamma = 0.15;     // slope of the linear class-K function, 1/s
  double v_max = 0.15;     // speed cap, m/s
  double grad_eps = 1e-9;  // gradients at or below this norm count as vanishing

  void validate() const;
};

struct FilterOutcome {
  ControlInput2D u{};
  bool constraint_active = false;
  bool degenerate = false;
  bool clamped = false;
};

/// Linear extended class-K function gamma * h.
constexpr double alpha(double h, double gamma) { return gamma * h; }

/// Minimum-norm change of u_nom satisfying grad . u >= -alpha(h) for a single
/// integrator, followed by a speed clamp to v_max.
///
/// With a vanishing gradient the constraint carries no direction: u_nom is
/// passed through when h >= 0 and the robot is stopped when h < 0.
FilterOutcome filter(ControlInput2D u_nom, double h, Vec2 grad, const FilterParams& params);

}  // namespace thermal_cbf
