#include "bdr/core.hpp"

#include <algorithm>
#include <cmath>

namespace bdr {

void require_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) throw DomainError(std::string(what) + ": non-finite entry");
}

void require_finite(const Matrix& a, const char* what) {
  if (!a.allFinite()) throw DomainError(std::string(what) + ": non-finite entry");
}

void require_same_size(const Vector& a, const Vector& b, const char* what) {
  if (a.size() != b.size()) {
    throw DimensionError(std::string(what) + ": length mismatch (" + std::to_string(a.size()) +
                         " vs " + std::to_string(b.size()) + ")");
  }
}

Vector SplittingProblem::dual_update(const Vector& w_prev, const Vector& z, double tau) const {
  if (!(tau > 0.0)) throw ParameterError("dual_update: tau must be positive");
  const Vector v = tau * w_prev + z;
  return (v - prox_g(v, tau)) / tau;
}

IterateState IterateState::origin(Eigen::Index d) {
  IterateState s;
  s.x = Vector::Zero(d);
  s.y = Vector::Zero(d);
  s.z = Vector::Zero(d);
  s.w = Vector::Zero(d);
  return s;
}

bool IterateState::finite() const {
  return x.allFinite() && y.allFinite() && z.allFinite() && w.allFinite();
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::kTolerance:
      return "tolerance";
    case Termination::kMaxIter:
      return "max_iter";
    case Termination::kDivergence:
      return "divergence";
  }
  return "unknown";
}

double relative_change(const Vector& z_new, const Vector& z_old) {
  require_same_size(z_new, z_old, "relative_change");
  return (z_new - z_old).norm() / std::max(z_old.norm(), kRelativeChangeGuard);
}

double objective_value(const SplittingProblem& problem, const Vector& x) {
  require_finite(x, "objective_value");
  const double h = problem.eval_h(x);
  if (h == kInfinity) return kInfinity;
  return problem.eval_f(x) + h - problem.eval_g(x);
}

}  // namespace bdr
