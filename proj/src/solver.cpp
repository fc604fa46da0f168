#include "bdr/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace bdr {
namespace {

void check_nu(double nu) {
  if (!(nu > 0.0 && nu < 2.0)) throw ParameterError("nu must lie in (0, 2)");
}

void validate(const SolverParams& p) {
  check_nu(p.nu);
  if (!(p.tau > 0.0)) throw ParameterError("tau must be positive");
  if (!(p.rho >= 0.0)) throw ParameterError("rho must be nonnegative");
  if (!(p.ell >= 0.0)) throw ParameterError("ell must be nonnegative");
  if (!(p.tol > 0.0)) throw ParameterError("tol must be positive");
  if (p.max_iter < 1) throw ParameterError("max_iter must be positive");
  if (p.adapt_gamma) {
    if (!(p.gamma0 > 0.0)) throw ParameterError("gamma0 must be positive");
    if (!(p.k_factor > 0.0)) throw ParameterError("k_factor must be positive");
  } else {
    if (!(p.gamma > 0.0)) throw ParameterError("gamma must be positive");
    const double bar = compute_gamma_bar(p.nu, p.rho, p.ell);
    if (!(p.gamma < bar)) {
      throw ParameterError("gamma=" + std::to_string(p.gamma) +
                           " is not below gamma_bar=" + std::to_string(bar));
    }
  }
}

double max_norm(const IterateState& s) {
  return std::max({s.x.norm(), s.y.norm(), s.z.norm(), s.w.norm()});
}

}  // namespace

double compute_gamma_bar(double nu, double rho, double ell) {
  check_nu(nu);
  if (!(rho >= 0.0) || !(ell >= 0.0)) throw ParameterError("rho and ell must be nonnegative");
  if (ell == 0.0) return kInfinity;
  const double ell2 = ell * ell;
  return (-nu * rho + std::sqrt(nu * nu * rho * rho + 8.0 * (2.0 - nu) * ell2)) / (4.0 * ell2);
}

double compute_delta(double nu, double rho, double ell, double gamma) {
  if (!(gamma > 0.0)) throw ParameterError("compute_delta: gamma must be positive");
  return (2.0 - nu - nu * rho * gamma - 2.0 * ell * ell * gamma * gamma) / (nu * gamma);
}

double theory_gamma(double nu, double rho, double ell) {
  return compute_gamma_bar(nu, rho, ell) - 1e-10;
}

double lyapunov_eval(const IterateState& s, const SplittingProblem& problem,
                     const SolverParams& params) {
  const double gamma = params.gamma;
  if (!(gamma > 0.0)) throw ParameterError("lyapunov_eval: gamma must be positive");
  const double g_conj = problem.eval_g_conj(s.w);
  if (g_conj == kInfinity) throw DomainError("lyapunov_eval: w lies outside dom g*");
  const double h = problem.eval_h(s.z);
  if (h == kInfinity) throw DomainError("lyapunov_eval: h(z) is infinite");
  return problem.eval_f(s.x) + h + g_conj - s.w.dot(s.z) +
         (s.x - s.y).squaredNorm() / (2.0 * gamma) - (s.y - s.z).squaredNorm() / (2.0 * gamma) +
         (1.0 - params.nu) / gamma * (s.x - s.z).squaredNorm();
}

IterateState bdr_step(const IterateState& s, const SplittingProblem& problem,
                      const SolverParams& params) {
  if (!(params.tau > 0.0)) throw ParameterError("bdr_step: tau must be positive");
  const double gamma = params.gamma;
  IterateState next;
  next.x = problem.prox_f(s.y, gamma);
  next.w = problem.dual_update(s.w, s.z, params.tau);
  next.z = problem.prox_h(2.0 * next.x - s.y + gamma * next.w, gamma);
  next.y = s.y + params.nu * (next.z - next.x);
  next.n = s.n + 1;
  return next;
}

double heuristic_gamma_update(double gamma, double gamma0, int n, const Vector& x_prev,
                              const Vector& x_next) {
  if (n < 1) throw ParameterError("heuristic_gamma_update: n must be >= 1");
  if (!(gamma > gamma0)) return gamma;
  const bool erratic = (x_next - x_prev).norm() > 1000.0 / n || x_prev.norm() > 1e10;
  return erratic ? std::max(gamma / 2.0, 0.9999 * gamma0) : gamma;
}

double stationarity_gap(const IterateState& s, double gamma) {
  return (s.x - s.z).norm() / gamma;
}

BdrResult bdr_solve(const SplittingProblem& problem, const SolverParams& params,
                    const IterateState& init) {
  validate(params);
  const Eigen::Index d = problem.dimension();
  if (init.x.size() != d || init.y.size() != d || init.z.size() != d || init.w.size() != d) {
    throw DimensionError("bdr_solve: initial state does not match problem dimension");
  }

  SolverParams run = params;
  if (run.adapt_gamma) run.gamma = run.k_factor * run.gamma0;

  BdrResult result;
  result.state = init;
  result.trace.reserve(static_cast<std::size_t>(std::min(run.max_iter, 4096)));

  for (int it = 1; it <= run.max_iter; ++it) {
    const double gamma_used = run.gamma;
    IterateState next = bdr_step(result.state, problem, run);
    next.n = it;

    if (!next.finite()) {
      throw DivergenceError("bdr_solve: non-finite iterate at n=" + std::to_string(it));
    }
    if (!run.adapt_gamma && max_norm(next) > kDivergenceNorm) {
      throw DivergenceError("bdr_solve: iterate norm exceeded 1e12 at n=" + std::to_string(it));
    }

    TraceRow row;
    row.n = it;
    row.dx = (next.x - result.state.x).norm();
    row.dz = (next.z - result.state.z).norm();
    row.dw = (next.w - result.state.w).norm();
    row.rel_change = relative_change(next.z, result.state.z);
    row.gamma_used = gamma_used;
    row.objective_at_z = objective_value(problem, next.z);
    if (run.monitor_lyapunov) row.lyapunov = lyapunov_eval(next, problem, run);
    result.trace.push_back(row);

    // With z_n = 0 the ratio says nothing (z often stays at 0 for the first
    // steps from the origin), so the y sequence has to have settled as well.
    const bool settled = result.state.z.squaredNorm() != 0.0 ||
                         relative_change(next.y, result.state.y) < run.tol;

    if (run.adapt_gamma) {
      run.gamma = heuristic_gamma_update(run.gamma, run.gamma0, it, result.state.x, next.x);
    }
    result.state = std::move(next);

    if (row.rel_change < run.tol && settled) {
      result.terminated_by = Termination::kTolerance;
      break;
    }
  }

  const double last_gamma = result.trace.empty() ? run.gamma : result.trace.back().gamma_used;
  result.stationarity_gap = stationarity_gap(result.state, last_gamma);
  result.final_gamma = last_gamma;
  return result;
}

BdrResult bdr_solve(const SplittingProblem& problem, const SolverParams& params) {
  return bdr_solve(problem, params, IterateState::origin(problem.dimension()));
}

BdrResult baseline_pdca_solve(const SplittingProblem& problem, const PdcaOptions& options) {
  const double ell = options.step_ell > 0.0 ? options.step_ell : problem.lipschitz_ell();
  if (!(ell > 0.0)) throw ParameterError("baseline_pdca_solve: ell must be positive");
  if (!(options.tol > 0.0)) throw ParameterError("baseline_pdca_solve: tol must be positive");
  if (options.max_iter < 1) throw ParameterError("baseline_pdca_solve: max_iter must be positive");

  const Eigen::Index d = problem.dimension();
  const double step = 1.0 / ell;
  Vector z = Vector::Zero(d);
  Vector z_prev = z;
  double t = 1.0;
  double obj = objective_value(problem, z);

  BdrResult result;
  for (int it = 1; it <= options.max_iter; ++it) {
    Vector u = z;
    double t_next = 1.0;
    if (options.extrapolate) {
      t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      u += ((t - 1.0) / t_next) * (z - z_prev);
    }
    const Vector xi = problem.subgradient_g(z);
    Vector z_next = problem.prox_h(u - step * (problem.grad_f(u) - xi), step);
    const double obj_next = objective_value(problem, z_next);
    if (options.extrapolate && obj_next > obj) {
      t_next = 1.0;  // restart momentum
    }

    TraceRow row;
    row.n = it;
    row.dx = (z_next - z).norm();
    row.dz = row.dx;
    row.rel_change = relative_change(z_next, z);
    row.gamma_used = step;
    row.objective_at_z = obj_next;
    result.trace.push_back(row);

    z_prev = std::move(z);
    z = std::move(z_next);
    obj = obj_next;
    t = t_next;
    if (!z.allFinite()) throw DivergenceError("baseline_pdca_solve: non-finite iterate");
    if (row.rel_change < options.tol) {
      result.terminated_by = Termination::kTolerance;
      break;
    }
  }

  result.state.x = z;
  result.state.y = z;
  result.state.z = z;
  result.state.w = problem.subgradient_g(z);
  result.state.n = static_cast<int>(result.trace.size());
  result.final_gamma = step;
  return result;
}

}  // namespace bdr
