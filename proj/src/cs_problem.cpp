#include "bdr/cs_problem.hpp"

#include <utility>

namespace bdr {

CsProblem::CsProblem(Matrix a, Vector b, double lambda_h, double lambda_g,
                     std::optional<double> ell, QuadraticRoute route)
    : a_(std::move(a)),
      b_(std::move(b)),
      lambda_h_(lambda_h),
      lambda_g_(lambda_g),
      ell_(0.0),
      route_(route) {
  if (b_.size() != a_.rows()) throw DimensionError("CsProblem: b length != rows of A");
  if (!(lambda_h_ >= 0.0) || !(lambda_g_ >= 0.0)) {
    throw ParameterError("CsProblem: regularization weights must be nonnegative");
  }
  require_finite(a_, "CsProblem A");
  require_finite(b_, "CsProblem b");
  if (route_ == QuadraticRoute::kAuto) {
    route_ = a_.rows() < a_.cols() ? QuadraticRoute::kWoodbury : QuadraticRoute::kDirect;
  }
  gram_ = route_ == QuadraticRoute::kWoodbury ? Matrix(a_ * a_.transpose())
                                              : Matrix(a_.transpose() * a_);
  ell_ = ell ? *ell : power_iteration_ell(a_);
  if (!(ell_ >= 0.0)) throw ParameterError("CsProblem: ell must be nonnegative");
}

Vector CsProblem::grad_f(const Vector& x) const { return a_.transpose() * (a_ * x - b_); }

std::shared_ptr<const QuadraticProxCache> CsProblem::quadratic_cache(double gamma) const {
  std::lock_guard lock(cache_mutex_);
  if (!cache_ || cache_->gamma() != gamma) {
    cache_ = std::make_shared<const QuadraticProxCache>(a_, b_, gamma, route_, gram_);
    ++factorizations_;
  }
  return cache_;
}

int CsProblem::factorizations() const {
  std::lock_guard lock(cache_mutex_);
  return factorizations_;
}

Vector CsProblem::prox_f(const Vector& y, double gamma) const {
  return prox_quadratic(*quadratic_cache(gamma), y, gamma);
}

Vector CsProblem::prox_h(const Vector& v, double gamma) const {
  return soft_threshold(v, gamma * lambda_h_);
}

Vector CsProblem::prox_g(const Vector& v, double kappa) const {
  return prox_l2_norm(v, kappa * lambda_g_);
}

double CsProblem::eval_f(const Vector& x) const { return 0.5 * (a_ * x - b_).squaredNorm(); }

double CsProblem::eval_h(const Vector& x) const { return lambda_h_ * x.lpNorm<1>(); }

double CsProblem::eval_g(const Vector& x) const { return lambda_g_ * x.norm(); }

double CsProblem::eval_g_conj(const Vector& w) const {
  // Indicator of the lambda_g ball.
  return w.norm() - lambda_g_ <= kConjugateDomainTol ? 0.0 : kInfinity;
}

Vector CsProblem::subgradient_g(const Vector& x) const {
  const double nrm = x.norm();
  if (nrm == 0.0) return Vector::Zero(x.size());
  return (lambda_g_ / nrm) * x;
}

Vector CsProblem::dual_update(const Vector& w_prev, const Vector& z, double tau) const {
  if (lambda_g_ == 0.0) {
    if (!(tau > 0.0)) throw ParameterError("dual_update: tau must be positive");
    return Vector::Zero(z.size());
  }
  return w_update(w_prev, z, tau, lambda_g_);
}

}  // namespace bdr
