#pragma once

#include <memory>
#include <mutex>
#include <optional>

#include "bdr/core.hpp"
#include "bdr/prox.hpp"

namespace bdr {

/// 0.5 |A x - b|^2 + lambda_h |x|_1 - lambda_g |x|_2.
///
/// lambda_h = lambda_g = lambda is the l1-l2 compressed-sensing model;
/// lambda_g = 0 gives the lasso. The smooth part is convex, so rho = 0 and
/// ell = lambda_max(A^T A).
class CsProblem final : public SplittingProblem {
 public:
  /// ell is estimated by power iteration unless given.
  CsProblem(Matrix a, Vector b, double lambda_h, double lambda_g,
            std::optional<double> ell = std::nullopt,
            QuadraticRoute route = QuadraticRoute::kAuto);

  CsProblem(const CsProblem&) = delete;
  CsProblem& operator=(const CsProblem&) = delete;

  Eigen::Index dimension() const override { return a_.cols(); }
  Eigen::Index measurements() const { return a_.rows(); }
  const Matrix& a() const { return a_; }
  const Vector& b() const { return b_; }
  double lambda_h() const { return lambda_h_; }
  double lambda_g() const { return lambda_g_; }

  Vector grad_f(const Vector& x) const override;
  Vector prox_f(const Vector& y, double gamma) const override;
  Vector prox_h(const Vector& v, double gamma) const override;
  Vector prox_g(const Vector& v, double kappa) const override;
  double eval_f(const Vector& x) const override;
  double eval_h(const Vector& x) const override;
  double eval_g(const Vector& x) const override;
  double eval_g_conj(const Vector& w) const override;
  Vector subgradient_g(const Vector& x) const override;
  double lipschitz_ell() const override { return ell_; }
  double weak_convexity_rho() const override { return 0.0; }
  Vector dual_update(const Vector& w_prev, const Vector& z, double tau) const override;

  /// Cache for the given gamma; rebuilt (re-factorized) when gamma changes.
  std::shared_ptr<const QuadraticProxCache> quadratic_cache(double gamma) const;

  /// Number of factorizations performed so far.
  int factorizations() const;

 private:
  Matrix a_;
  Vector b_;
  double lambda_h_;
  double lambda_g_;
  double ell_;
  QuadraticRoute route_;
  Matrix gram_;

  mutable std::mutex cache_mutex_;
  mutable std::shared_ptr<const QuadraticProxCache> cache_;
  mutable int factorizations_ = 0;
};

// Tolerance on |w| - lambda_g before g*(w) is reported as +infinity.
inline constexpr double kConjugateDomainTol = 1e-9;

}  // namespace bdr
