#pragma once

#include "bdr/core.hpp"

namespace bdr {

/// Admissible step-size bound
///   (-nu rho + sqrt(nu^2 rho^2 + 8 (2 - nu) ell^2)) / (4 ell^2),
/// kInfinity when ell = 0.
double compute_gamma_bar(double nu, double rho, double ell);

/// Sufficient-decrease coefficient (2 - nu - nu rho gamma - 2 ell^2 gamma^2) / (nu gamma).
/// Positive exactly when gamma < compute_gamma_bar(nu, rho, ell).
double compute_delta(double nu, double rho, double ell, double gamma);

/// gamma_bar - 1e-10, the fixed step used in theory mode.
double theory_gamma(double nu, double rho, double ell);

/// Merit function
///   f(x) + h(z) + g*(w) - <w, z> + |x - y|^2 / (2 gamma) - |y - z|^2 / (2 gamma)
///   + (1 - nu) / gamma |x - z|^2.
/// Throws DomainError when w is outside dom g* or h(z) is infinite.
double lyapunov_eval(const IterateState& state, const SplittingProblem& problem,
                     const SolverParams& params);

/// One BDR sweep:
///   x+ = prox_{gamma f}(y)
///   w+ = prox_{g*/tau}(w + z / tau)
///   z+ = prox_{gamma h}(2 x+ - y + gamma w+)
///   y+ = y + nu (z+ - x+)
IterateState bdr_step(const IterateState& state, const SplittingProblem& problem,
                      const SolverParams& params);

/// max{gamma / 2, 0.9999 gamma0} when gamma > gamma0 and either
/// |x_next - x_prev| > 1000 / n or |x_prev| > 1e10; gamma otherwise.
double heuristic_gamma_update(double gamma, double gamma0, int n, const Vector& x_prev,
                              const Vector& x_next);

/// |x - z| / gamma. Vanishes at fixed points, where z is stationary.
double stationarity_gap(const IterateState& state, double gamma);

struct BdrResult {
  IterateState state;
  ConvergenceTrace trace;
  Termination terminated_by = Termination::kMaxIter;
  double stationarity_gap = 0.0;
  double final_gamma = 0.0;
};

// Iterate norm beyond which a fixed-gamma run is declared divergent.
inline constexpr double kDivergenceNorm = 1e12;

/// Runs bdr_step from `init` until relative_change(z_{n+1}, z_n) < tol (while
/// z_n = 0 the y sequence must also change by less than tol) or
/// max_iter steps. With adapt_gamma off, params.gamma must be admissible.
/// With adapt_gamma on, gamma starts at k_factor * gamma0 and is reduced by
/// heuristic_gamma_update after every step.
BdrResult bdr_solve(const SplittingProblem& problem, const SolverParams& params,
                    const IterateState& init);

/// Same as above, started at the origin.
BdrResult bdr_solve(const SplittingProblem& problem, const SolverParams& params);

struct PdcaOptions {
  double tol = 1e-6;
  int max_iter = 3000;
  bool extrapolate = false;
  /// Step is 1 / step_ell; defaults to problem.lipschitz_ell().
  double step_ell = 0.0;
};

/// Proximal DC baseline: z+ = prox_{h / L}(u - (grad f(u) - xi) / L) with xi a
/// subgradient of g at z, u = z (or an extrapolated point with restart).
BdrResult baseline_pdca_solve(const SplittingProblem& problem, const PdcaOptions& options);

}  // namespace bdr
