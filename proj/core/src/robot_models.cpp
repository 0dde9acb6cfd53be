#include "thermal_cbf/robot_models.hpp"

#include <cmath>
#include <numbers>

#include "thermal_cbf/error.hpp"

namespace thermal_cbf {

void NominalParams::validate() const {
  if (!(k > 0.0)) throw ContractViolation("nominal speed k must be positive");
  if (!(goal_eps > 0.0)) throw ContractViolation("goal_eps must be positive");
}

void DiffeoParams::validate() const {
  if (!(r > 0.0)) throw ContractViolation("look-ahead offset r must be positive");
}

double normalize_angle(double theta) {
  constexpr double kPi = std::numbers::pi;
  double t = std::remainder(theta, 2.0 * kPi);  // [-pi, pi]
  if (t <= -kPi) t += 2.0 * kPi;
  return t;
}

ControlInput2D nominal_control(Vec2 p, Vec2 goal, const NominalParams& params) {
  const Vec2 d = goal - p;
  const double dist = norm(d);
  if (dist < params.goal_eps) return {0.0, 0.0};
  return (params.k / dist) * d;
}

Vec2 integrate_single(Vec2 p, ControlInput2D u, double dt) {
  if (!(dt > 0.0)) throw ContractViolation("time step must be positive");
  return p + dt * u;
}

UnicycleCommand unicycle_from_velocity(double theta, ControlInput2D u, const DiffeoParams& params) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {c * u.x + s * u.y, (-s * u.x + c * u.y) / params.r};
}

Vec2 lookahead_point(const RobotState& s, const DiffeoParams& params) {
  return {s.x + params.r * std::cos(s.theta), s.y + params.r * std::sin(s.theta)};
}

RobotState integrate_unicycle(const RobotState& s, UnicycleCommand cmd, double dt) {
  if (!(dt > 0.0)) throw ContractViolation("time step must be positive");
  return {s.x + cmd.v * std::cos(s.theta) * dt, s.y + cmd.v * std::sin(s.theta) * dt,
          normalize_angle(s.theta + cmd.omega * dt)};
}

}  // namespace thermal_cbf
