#pragma once

#include "thermal_cbf/geometry.hpp"
#include "thermal_cbf/safety_filter.hpp"

namespace thermal_cbf {

/// Planar pose; theta is kept in (-pi, pi].
struct RobotState {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  Vec2 position() const { return {x, y}; }
};

struct NominalParams {
  double k = 0.15;         // commanded speed, m/s
  double goal_eps = 0.005;  // arrival radius, m

  void validate() const;
};

/// Look-ahead offset between the wheel-axis center and the controlled point.
struct DiffeoParams {
  double r = 0.05;

  void validate() const;
};

struct UnicycleCommand {
  double v = 0.0;      // m/s
  double omega = 0.0;  // rad/s
};

double normalize_angle(double theta);

/// Proportional goal seeking with gain k / distance, so the command always has
/// magnitude k. Zero inside goal_eps.
ControlInput2D nominal_control(Vec2 p, Vec2 goal, const NominalParams& params);

Vec2 integrate_single(Vec2 p, ControlInput2D u, double dt);

/// Near-identity map from the velocity of the look-ahead point to (v, omega).
UnicycleCommand unicycle_from_velocity(double theta, ControlInput2D u, const DiffeoParams& params);

/// Point r ahead of the axle center along the heading.
Vec2 lookahead_point(const RobotState& s, const DiffeoParams& params);

/// Explicit Euler step of the unicycle kinematics.
RobotState integrate_unicycle(const RobotState& s, UnicycleCommand cmd, double dt);

}  // namespace thermal_cbf
