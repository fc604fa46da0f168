#pragma once

#include <cstdint>

#include "bdr/core.hpp"
#include "bdr/problem_gen.hpp"

namespace bdr::test {

inline Vector random_vector(Rng& rng, Eigen::Index n, double scale = 1.0) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = scale * rng.normal();
  return v;
}

inline Matrix random_matrix(Rng& rng, Eigen::Index m, Eigen::Index n) {
  Matrix a(m, n);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = rng.normal();
  return a;
}

inline double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform01(); }

inline Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

/// f = h = g = 0 except that h may be the indicator of the nonnegative orthant.
class TrivialProblem final : public SplittingProblem {
 public:
  explicit TrivialProblem(Eigen::Index d, bool nonneg_indicator = false)
      : d_(d), nonneg_(nonneg_indicator) {}
  Eigen::Index dimension() const override { return d_; }
  Vector grad_f(const Vector& x) const override { return Vector::Zero(x.size()); }
  Vector prox_f(const Vector& y, double) const override { return y; }
  Vector prox_h(const Vector& v, double) const override {
    return nonneg_ ? Vector(v.cwiseMax(0.0)) : v;
  }
  Vector prox_g(const Vector& v, double) const override { return v; }
  double eval_f(const Vector&) const override { return 0.0; }
  double eval_h(const Vector& x) const override {
    return nonneg_ && x.minCoeff() < 0.0 ? kInfinity : 0.0;
  }
  double eval_g(const Vector&) const override { return 0.0; }
  double eval_g_conj(const Vector& w) const override {
    return w.squaredNorm() == 0.0 ? 0.0 : kInfinity;
  }
  Vector subgradient_g(const Vector& x) const override { return Vector::Zero(x.size()); }
  double lipschitz_ell() const override { return 0.0; }
  double weak_convexity_rho() const override { return 0.0; }

 private:
  Eigen::Index d_;
  bool nonneg_;
};

}  // namespace bdr::test
