#include "thermal_cbf/safety_filter.hpp"

#include <cmath>

#include "thermal_cbf/error.hpp"

namespace thermal_cbf {

void FilterParams::validate() const {
  if (!(gamma > 0.0)) throw ContractViolation("filter gamma must be positive");
  if (!(v_max > 0.0)) throw ContractViolation("filter v_max must be positive");
  if (!(grad_eps >= 0.0)) throw ContractViolation("filter grad_eps must be non-negative");
}

FilterOutcome filter(ControlInput2D u_nom, double h, Vec2 grad, const FilterParams& params) {
  if (!is_finite(u_nom) || !std::isfinite(h) || !is_finite(grad)) {
    throw ContractViolation("safety filter received a non-finite input");
  }
  params.validate();

  FilterOutcome out;
  const double gnorm2 = dot(grad, grad);
  if (std::sqrt(gnorm2) <= params.grad_eps) {
    if (h >= 0.0) {
      out.u = u_nom;
    } else {
      out.u = {0.0, 0.0};
      out.degenerate = true;
    }
  } else {
    const double bound = -alpha(h, params.gamma);
    const double lhs = dot(grad, u_nom);
    if (lhs >= bound) {
      out.u = u_nom;
    } else {
      out.u = u_nom + ((bound - lhs) / gnorm2) * grad;
      out.constraint_active = true;
    }
  }

  const double speed = norm(out.u);
  if (speed > params.v_max) {
    out.u = (params.v_max / speed) * out.u;
    out.clamped = true;
  }
  return out;
}

}  // namespace thermal_cbf
