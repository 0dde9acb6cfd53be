#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "thermal_cbf/laplace_system.hpp"

namespace thermal_cbf {

struct SolveStats {
  std::size_t iterations = 0;
  double final_relative_residual = 0.0;
  bool converged = false;
  double wall_time_s = 0.0;
  std::size_t breakdown_restarts = 0;
};

struct SolverConfig {
  double tol = 1e-8;  // on ||A x - b||_2 / ||b||_2
  std::optional<std::size_t> max_iters;  // default min(10 N, 20000)
  std::size_t restart = 50;              // GMRES only

  std::size_t iteration_limit(std::size_t n) const;
  void validate() const;
};

struct SolveResult {
  std::vector<double> solution;
  SolveStats stats;
};

enum class SolverKind { Gmres, Bicgstab };

std::string_view to_string(SolverKind kind);
/// Accepts "gmres" or "bicgstab"; throws ContractViolation otherwise.
SolverKind solver_from_string(std::string_view name);

/// y = A x, rows summed left to right.
void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y);
std::vector<double> spmv(const CsrMatrix& a, std::span<const double> x);

/// ||A x - b||_2 / ||b||_2, or ||A x||_2 when b = 0.
double relative_residual(const LinearSystem& sys, std::span<const double> x);

/// Restarted GMRES(m) with modified Gram-Schmidt and Givens rotations,
/// zero initial guess. Non-convergence is reported through stats, not thrown.
SolveResult gmres(const LinearSystem& sys, const SolverConfig& cfg = {});

/// BiCGSTAB, zero initial guess. On a rho/omega breakdown it restarts from
/// the current iterate once; a second breakdown ends the solve unconverged.
SolveResult bicgstab(const LinearSystem& sys, const SolverConfig& cfg = {});

SolveResult solve(const LinearSystem& sys, SolverKind kind, const SolverConfig& cfg = {});

class OracleDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Jacobi sweeps of the averaging stencil. Stops once the max-norm update is
/// below tol and the contraction estimate bounds the remaining error by tol.
/// Throws OracleDiverged when max_iters is exhausted.
std::vector<double> jacobi_oracle(const LinearSystem& sys, double tol, std::size_t max_iters);

}  // namespace thermal_cbf
