#pragma once

#include "bdr/core.hpp"

namespace bdr {

/// Componentwise sign(v_i) max(|v_i| - kappa, 0), the prox of kappa |.|_1.
Vector soft_threshold(const Vector& v, double kappa);

/// Prox of kappa |.|_2: block shrinkage toward the origin.
Vector prox_l2_norm(const Vector& v, double kappa);

/// Closed-form dual step for g = lambda |.|_2:
/// min{lambda / |tau w + z|, 1 / tau} (tau w + z), and 0 when tau w + z = 0.
Vector w_update(const Vector& w, const Vector& z, double tau, double lambda);

enum class QuadraticRoute { kAuto, kDirect, kWoodbury };

/// Factorization backing prox of f = 0.5 |A x - b|^2 for a fixed gamma.
///
/// The direct route factors (A^T A + I / gamma) (d x d). The Woodbury route
/// factors (I_m + gamma A A^T) (m x m) and is picked by kAuto when m < d.
/// A and b are referenced, not copied, and must outlive the cache.
class QuadraticProxCache {
 public:
  QuadraticProxCache(const Matrix& a, const Vector& b, double gamma,
                     QuadraticRoute route = QuadraticRoute::kAuto);

  /// Variant that reuses a precomputed Gram matrix (A^T A for the direct
  /// route, A A^T for Woodbury).
  QuadraticProxCache(const Matrix& a, const Vector& b, double gamma, QuadraticRoute route,
                     const Matrix& gram);

  double gamma() const { return gamma_; }
  QuadraticRoute route() const { return route_; }
  const Matrix& a() const { return *a_; }
  const Vector& b() const { return *b_; }

  Vector solve(const Vector& y) const;

 private:
  void factor(const Matrix& gram);

  const Matrix* a_;
  const Vector* b_;
  double gamma_;
  QuadraticRoute route_;
  Vector atb_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

/// argmin_x 0.5 |A x - b|^2 + |x - y|^2 / (2 gamma). Throws UsageError if the
/// cache was built for a different gamma.
Vector prox_quadratic(const QuadraticProxCache& cache, const Vector& y, double gamma);

/// Largest eigenvalue of A^T A by power iteration from the normalized
/// all-ones vector. Iterates on the smaller of A^T A and A A^T.
double power_iteration_ell(const Matrix& a, int iters = 1000, double tol = 1e-10);

}  // namespace bdr
