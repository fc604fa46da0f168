#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace bdr {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Objective values that are +infinity (h outside its domain, g* outside the
// dual ball) are reported as this value. NaN is never used as a sentinel.
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Guard used by relative_change when the previous iterate is the origin.
inline constexpr double kRelativeChangeGuard = 1e-300;

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct ParameterError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};
struct UsageError : std::logic_error {
  using std::logic_error::logic_error;
};
struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require_finite(const Vector& v, const char* what);
void require_finite(const Matrix& a, const char* what);
void require_same_size(const Vector& a, const Vector& b, const char* what);

/// Abstract f + h - g splitting problem as seen by the BDR iteration.
///
/// f is differentiable, rho-weakly convex with ell-Lipschitz gradient; g is
/// convex and finite everywhere; h is lower semicontinuous. Only proximal and
/// gradient evaluations are exposed.
class SplittingProblem {
 public:
  virtual ~SplittingProblem() = default;

  virtual Eigen::Index dimension() const = 0;

  virtual Vector grad_f(const Vector& x) const = 0;
  /// argmin_u f(u) + |u - y|^2 / (2 gamma)
  virtual Vector prox_f(const Vector& y, double gamma) const = 0;
  /// argmin_u h(u) + |u - v|^2 / (2 gamma)
  virtual Vector prox_h(const Vector& v, double gamma) const = 0;
  /// argmin_u g(u) + |u - v|^2 / (2 kappa)
  virtual Vector prox_g(const Vector& v, double kappa) const = 0;

  virtual double eval_f(const Vector& x) const = 0;
  /// May return kInfinity.
  virtual double eval_h(const Vector& x) const = 0;
  virtual double eval_g(const Vector& x) const = 0;
  /// May return kInfinity.
  virtual double eval_g_conj(const Vector& w) const = 0;
  /// Some element of the subdifferential of g at x.
  virtual Vector subgradient_g(const Vector& x) const = 0;

  virtual double lipschitz_ell() const = 0;
  virtual double weak_convexity_rho() const = 0;

  /// Dual step argmin_w g*(w) - <w, z> + (tau/2)|w - w_prev|^2 for tau > 0.
  /// The default goes through Moreau's decomposition with prox_g.
  virtual Vector dual_update(const Vector& w_prev, const Vector& z, double tau) const;
};

struct SolverParams {
  double gamma = 0.0;
  double tau = 20.0;
  double nu = 1.4;
  double rho = 0.0;
  double ell = 1.0;
  double tol = 1e-6;
  int max_iter = 3000;
  bool adapt_gamma = false;
  double gamma0 = 0.447;
  double k_factor = 10.0;
  bool monitor_lyapunov = false;
};

struct IterateState {
  Vector x, y, z, w;
  int n = 0;

  static IterateState origin(Eigen::Index d);
  Eigen::Index dimension() const { return x.size(); }
  bool finite() const;
};

struct TraceRow {
  int n = 0;
  std::optional<double> lyapunov;
  double objective_at_z = 0.0;
  double dx = 0.0;
  double dz = 0.0;
  double dw = 0.0;
  double rel_change = 0.0;
  double gamma_used = 0.0;
};

using ConvergenceTrace = std::vector<TraceRow>;

enum class Termination { kTolerance, kMaxIter, kDivergence };

std::string to_string(Termination t);

struct BenchReport {
  int case_id = 0;
  int run = 0;
  std::string algorithm = "bdr";
  std::string kind;
  Eigen::Index m = 0, d = 0, s = 0;
  std::uint64_t seed = 0;
  int iterations = 0;
  // Absent when the instance has no ground truth; kInfinity after divergence.
  std::optional<double> error_vs_ground_truth;
  // kInfinity on exact recovery.
  std::optional<double> snr_db;
  double final_objective = 0.0;
  double stationarity_gap = 0.0;
  double wall_time_s = 0.0;
  Termination terminated_by = Termination::kMaxIter;
};

/// |z_new - z_old| / max(|z_old|, kRelativeChangeGuard)
double relative_change(const Vector& z_new, const Vector& z_old);

/// f(x) + h(x) - g(x); kInfinity when h(x) is.
double objective_value(const SplittingProblem& problem, const Vector& x);

}  // namespace bdr
