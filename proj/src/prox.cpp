#include "bdr/prox.hpp"

#include <cmath>
#include <string>

namespace bdr {

Vector soft_threshold(const Vector& v, double kappa) {
  if (!(kappa >= 0.0)) throw ParameterError("soft_threshold: kappa must be nonnegative");
  Vector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v[i]) - kappa;
    out[i] = mag > 0.0 ? std::copysign(mag, v[i]) : 0.0;
  }
  return out;
}

Vector prox_l2_norm(const Vector& v, double kappa) {
  if (!(kappa >= 0.0)) throw ParameterError("prox_l2_norm: kappa must be nonnegative");
  const double nrm = v.norm();
  if (nrm > kappa) return v - (kappa / nrm) * v;
  return Vector::Zero(v.size());
}

Vector w_update(const Vector& w, const Vector& z, double tau, double lambda) {
  if (!(tau > 0.0)) throw ParameterError("w_update: tau must be positive");
  if (!(lambda > 0.0)) throw ParameterError("w_update: lambda must be positive");
  require_same_size(w, z, "w_update");
  const Vector v = tau * w + z;
  const double nrm = v.norm();
  if (nrm == 0.0) return Vector::Zero(v.size());
  return std::min(lambda / nrm, 1.0 / tau) * v;
}

QuadraticProxCache::QuadraticProxCache(const Matrix& a, const Vector& b, double gamma,
                                       QuadraticRoute route)
    : a_(&a), b_(&b), gamma_(gamma), route_(route) {
  if (route_ == QuadraticRoute::kAuto) {
    route_ = a.rows() < a.cols() ? QuadraticRoute::kWoodbury : QuadraticRoute::kDirect;
  }
  const Matrix gram = route_ == QuadraticRoute::kWoodbury ? Matrix(a * a.transpose())
                                                          : Matrix(a.transpose() * a);
  factor(gram);
}

QuadraticProxCache::QuadraticProxCache(const Matrix& a, const Vector& b, double gamma,
                                       QuadraticRoute route, const Matrix& gram)
    : a_(&a), b_(&b), gamma_(gamma), route_(route) {
  if (route_ == QuadraticRoute::kAuto) {
    route_ = a.rows() < a.cols() ? QuadraticRoute::kWoodbury : QuadraticRoute::kDirect;
  }
  factor(gram);
}

void QuadraticProxCache::factor(const Matrix& gram) {
  if (!(gamma_ > 0.0)) throw ParameterError("QuadraticProxCache: gamma must be positive");
  if (b_->size() != a_->rows()) throw DimensionError("QuadraticProxCache: b length != rows of A");
  atb_ = a_->transpose() * (*b_);
  Eigen::MatrixXd sys;
  if (route_ == QuadraticRoute::kWoodbury) {
    if (gram.rows() != a_->rows() || gram.cols() != a_->rows()) {
      throw DimensionError("QuadraticProxCache: Woodbury route needs the m x m Gram matrix");
    }
    sys = gamma_ * gram;
    sys.diagonal().array() += 1.0;
  } else {
    if (gram.rows() != a_->cols() || gram.cols() != a_->cols()) {
      throw DimensionError("QuadraticProxCache: direct route needs the d x d Gram matrix");
    }
    sys = gram;
    sys.diagonal().array() += 1.0 / gamma_;
  }
  llt_.compute(sys);
  if (llt_.info() != Eigen::Success) {
    throw DomainError("QuadraticProxCache: factorization failed");
  }
}

Vector QuadraticProxCache::solve(const Vector& y) const {
  if (y.size() != a_->cols()) throw DimensionError("prox_quadratic: y length != cols of A");
  if (route_ == QuadraticRoute::kWoodbury) {
    // (I + gamma A^T A)^{-1} r = r - gamma A^T (I_m + gamma A A^T)^{-1} A r
    const Vector r = gamma_ * atb_ + y;
    const Vector s = llt_.solve(Eigen::VectorXd(*a_ * r));
    return r - gamma_ * (a_->transpose() * s);
  }
  return llt_.solve(Eigen::VectorXd(atb_ + y / gamma_));
}

Vector prox_quadratic(const QuadraticProxCache& cache, const Vector& y, double gamma) {
  if (gamma != cache.gamma()) {
    throw UsageError("prox_quadratic: cache built for gamma=" + std::to_string(cache.gamma()) +
                     ", called with gamma=" + std::to_string(gamma));
  }
  return cache.solve(y);
}

double power_iteration_ell(const Matrix& a, int iters, double tol) {
  if (iters < 1) throw ParameterError("power_iteration_ell: iters must be >= 1");
  if (!(tol > 0.0)) throw ParameterError("power_iteration_ell: tol must be positive");
  if (a.size() == 0 || a.cwiseAbs().maxCoeff() == 0.0) return 0.0;

  // A A^T and A^T A share their nonzero spectrum.
  const bool small_rows = a.rows() <= a.cols();
  const Eigen::Index n = small_rows ? a.rows() : a.cols();
  auto apply = [&](const Vector& v) -> Vector {
    if (small_rows) return a * (a.transpose() * v);
    return a.transpose() * (a * v);
  };

  Vector v = Vector::Ones(n) / std::sqrt(static_cast<double>(n));
  double estimate = 0.0;
  for (int k = 0; k < iters; ++k) {
    Vector av = apply(v);
    const double rayleigh = v.dot(av);
    const double nrm = av.norm();
    if (nrm == 0.0) return 0.0;
    v = av / nrm;
    if (k > 0 && std::abs(rayleigh - estimate) <= tol * std::abs(rayleigh)) {
      return rayleigh;
    }
    estimate = rayleigh;
  }
  return v.dot(apply(v));
}

}  // namespace bdr
