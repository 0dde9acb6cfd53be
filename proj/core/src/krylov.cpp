#include "thermal_cbf/krylov.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "thermal_cbf/error.hpp"

namespace thermal_cbf {
namespace {

using Clock = std::chrono::steady_clock;

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

// y += s * x
void axpy(double s, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += s * x[i];
}

void residual(const LinearSystem& sys, std::span<const double> x, std::span<double> r) {
  spmv(sys.matrix, x, r);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = sys.rhs[i] - r[i];
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void require_nonempty(const LinearSystem& sys) {
  if (sys.size() == 0) throw ContractViolation("solver called on an empty system");
  if (sys.rhs.size() != sys.size()) throw ContractViolation("rhs length does not match matrix");
}

}  // namespace

std::size_t SolverConfig::iteration_limit(std::size_t n) const {
  if (max_iters) return *max_iters;
  return std::min<std::size_t>(10 * n, 20000);
}

void SolverConfig::validate() const {
  if (!(tol > 0.0)) throw ContractViolation("solver tolerance must be positive");
  if (restart < 1) throw ContractViolation("GMRES restart length must be at least 1");
}

std::string_view to_string(SolverKind kind) {
  return kind == SolverKind::Gmres ? "gmres" : "bicgstab";
}

SolverKind solver_from_string(std::string_view name) {
  if (name == "gmres") return SolverKind::Gmres;
  if (name == "bicgstab") return SolverKind::Bicgstab;
  throw ContractViolation("unknown solver '" + std::string(name) + "'");
}

void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y) {
  if (x.size() != a.n || y.size() != a.n) {
    throw ContractViolation("spmv: vector length does not match matrix dimension");
  }
  const std::size_t* rp = a.row_ptr.data();
  const std::size_t* ci = a.col_idx.data();
  const double* v = a.values.data();
  for (std::size_t i = 0; i < a.n; ++i) {
    double s = 0.0;
    for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) s += v[k] * x[ci[k]];
    y[i] = s;
  }
}

std::vector<double> spmv(const CsrMatrix& a, std::span<const double> x) {
  std::vector<double> y(a.n);
  spmv(a, x, y);
  return y;
}

double relative_residual(const LinearSystem& sys, std::span<const double> x) {
  std::vector<double> r(sys.size());
  residual(sys, x, r);
  const double bnorm = norm2(sys.rhs);
  return bnorm > 0.0 ? norm2(r) / bnorm : norm2(r);
}

SolveResult gmres(const LinearSystem& sys, const SolverConfig& cfg) {
  cfg.validate();
  require_nonempty(sys);
  const auto t0 = Clock::now();
  const std::size_t n = sys.size();
  const std::size_t m = std::min(cfg.restart, n);
  const std::size_t limit = cfg.iteration_limit(n);

  SolveResult out;
  out.solution.assign(n, 0.0);
  auto& x = out.solution;
  auto& st = out.stats;

  const double bnorm = norm2(sys.rhs);
  if (bnorm == 0.0) {
    st.converged = true;
    st.wall_time_s = seconds_since(t0);
    return out;
  }
  const double target = cfg.tol * bnorm;

  std::vector<double> basis((m + 1) * n);
  auto vec = [&](std::size_t k) { return std::span<double>(basis).subspan(k * n, n); };
  std::vector<double> hess((m + 1) * m, 0.0);  // column-major, leading dim m+1
  auto h = [&](std::size_t i, std::size_t j) -> double& { return hess[j * (m + 1) + i]; };
  std::vector<double> cs(m), sn(m), g(m + 1), y(m);
  std::vector<double> r(n);

  double rnorm = 0.0;
  while (true) {
    residual(sys, x, r);
    rnorm = norm2(r);
    if (rnorm <= target || st.iterations >= limit) break;

    {
      auto v0 = vec(0);
      for (std::size_t i = 0; i < n; ++i) v0[i] = r[i] / rnorm;
    }
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = rnorm;

    std::size_t k = 0;
    while (k < m && st.iterations < limit) {
      auto w = vec(k + 1);
      spmv(sys.matrix, vec(k), w);
      ++st.iterations;
      for (std::size_t i = 0; i <= k; ++i) {
        const double hik = dot(w, vec(i));
        h(i, k) = hik;
        axpy(-hik, vec(i), w);
      }
      const double hnext = norm2(w);
      h(k + 1, k) = hnext;

      for (std::size_t i = 0; i < k; ++i) {
        const double t = cs[i] * h(i, k) + sn[i] * h(i + 1, k);
        h(i + 1, k) = -sn[i] * h(i, k) + cs[i] * h(i + 1, k);
        h(i, k) = t;
      }
      const double denom = std::hypot(h(k, k), h(k + 1, k));
      cs[k] = h(k, k) / denom;
      sn[k] = h(k + 1, k) / denom;
      h(k, k) = denom;
      h(k + 1, k) = 0.0;
      g[k + 1] = -sn[k] * g[k];
      g[k] = cs[k] * g[k];
      ++k;

      // happy breakdown: the Krylov space is invariant, the LS solution is exact
      if (hnext <= 1e-14 * denom) break;
      for (double& wi : w) wi /= hnext;
      if (std::abs(g[k]) <= target) break;
    }

    for (std::size_t i = k; i-- > 0;) {
      double s = g[i];
      for (std::size_t j = i + 1; j < k; ++j) s -= h(i, j) * y[j];
      y[i] = s / h(i, i);
    }
    for (std::size_t j = 0; j < k; ++j) axpy(y[j], vec(j), x);
  }

  st.final_relative_residual = rnorm / bnorm;
  st.converged = st.final_relative_residual <= cfg.tol;
  st.wall_time_s = seconds_since(t0);
  return out;
}

SolveResult bicgstab(const LinearSystem& sys, const SolverConfig& cfg) {
  cfg.validate();
  require_nonempty(sys);
  const auto t0 = Clock::now();
  const std::size_t n = sys.size();
  const std::size_t limit = cfg.iteration_limit(n);

  SolveResult out;
  out.solution.assign(n, 0.0);
  auto& x = out.solution;
  auto& st = out.stats;

  const double bnorm = norm2(sys.rhs);
  if (bnorm == 0.0) {
    st.converged = true;
    st.wall_time_s = seconds_since(t0);
    return out;
  }
  const double target = cfg.tol * bnorm;
  constexpr double kTiny = 1e-300;

  std::vector<double> r(sys.rhs), rhat(n), p(n), v(n), s(n), t(n);
  bool failed = false;

  while (!failed && st.iterations < limit) {
    // (re)start from the current iterate
    residual(sys, x, r);
    if (norm2(r) <= target) break;
    rhat = r;
    std::fill(p.begin(), p.end(), 0.0);
    std::fill(v.begin(), v.end(), 0.0);
    double rho_old = 1.0, alpha = 1.0, omega = 1.0;
    bool breakdown = false;
    bool recurrence_converged = false;

    while (st.iterations < limit) {
      const double rho = dot(rhat, r);
      if (std::abs(rho) <= kTiny || std::abs(rho) <= 1e-30 * norm2(rhat) * norm2(r)) {
        breakdown = true;
        break;
      }
      const double beta = (rho / rho_old) * (alpha / omega);
      for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
      spmv(sys.matrix, p, v);
      ++st.iterations;
      const double rv = dot(rhat, v);
      if (std::abs(rv) <= kTiny) {
        breakdown = true;
        break;
      }
      alpha = rho / rv;
      for (std::size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
      if (norm2(s) <= target) {
        axpy(alpha, p, x);
        recurrence_converged = true;
        break;
      }
      spmv(sys.matrix, s, t);
      const double tt = dot(t, t);
      if (tt <= kTiny) {
        axpy(alpha, p, x);
        breakdown = true;
        break;
      }
      omega = dot(t, s) / tt;
      for (std::size_t i = 0; i < n; ++i) {
        x[i] += alpha * p[i] + omega * s[i];
        r[i] = s[i] - omega * t[i];
      }
      if (norm2(r) <= target) {
        recurrence_converged = true;
        break;
      }
      if (std::abs(omega) <= kTiny) {
        breakdown = true;
        break;
      }
      rho_old = rho;
    }

    if (breakdown) {
      if (st.breakdown_restarts > 0) failed = true;
      ++st.breakdown_restarts;
    } else if (!recurrence_converged) {
      break;  // iteration limit
    }
    // recurrence convergence falls through to the true-residual check above
  }

  st.final_relative_residual = relative_residual(sys, x);
  st.converged = st.final_relative_residual <= cfg.tol;
  st.wall_time_s = seconds_since(t0);
  return out;
}

SolveResult solve(const LinearSystem& sys, SolverKind kind, const SolverConfig& cfg) {
  return kind == SolverKind::Gmres ? gmres(sys, cfg) : bicgstab(sys, cfg);
}

std::vector<double> jacobi_oracle(const LinearSystem& sys, double tol, std::size_t max_iters) {
  require_nonempty(sys);
  if (!(tol > 0.0)) throw ContractViolation("jacobi tolerance must be positive");
  const auto& a = sys.matrix;
  const std::size_t n = sys.size();
  std::vector<double> x(n, 0.0), next(n);
  double prev_update = 0.0;

  for (std::size_t it = 0; it < max_iters; ++it) {
    double update = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double diag = 0.0;
      double s = sys.rhs[i];
      for (std::size_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
        if (a.col_idx[k] == i) {
          diag = a.values[k];
        } else {
          s -= a.values[k] * x[a.col_idx[k]];
        }
      }
      next[i] = s / diag;
      update = std::max(update, std::abs(next[i] - x[i]));
    }
    x.swap(next);
    if (update == 0.0) return x;
    if (update < tol && it > 0) {
      // a-posteriori bound: error <= update * q / (1 - q), q the contraction rate
      const double q = std::min(update / prev_update, 1.0 - 1e-12);
      if (update * q / (1.0 - q) < tol) return x;
    }
    prev_update = update;
  }
  throw OracleDiverged("jacobi oracle did not converge within " + std::to_string(max_iters) +
                       " sweeps");
}

}  // namespace thermal_cbf
