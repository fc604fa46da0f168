#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "bdr/core.hpp"
#include "bdr/problem_gen.hpp"

namespace bdr {

enum class Suite { kGaussianCases, kPdctCases, kReconstruction, kSingle };

std::string to_string(Suite s);
Suite suite_from_string(const std::string& s);

enum class GammaMode { kTheory, kHeuristic };

/// Everything needed to reproduce a benchmark. Keys of the flat config file
/// are the field names below (case_ids is a comma-separated list).
struct ExperimentConfig {
  Suite suite = Suite::kGaussianCases;
  std::vector<int> case_ids;  // empty: first case of the suite
  int runs = 30;
  double lambda = 0.1;
  std::uint64_t seed_base = 1;
  std::filesystem::path output_dir = "bench_out";
  double scale = 1.0;
  int threads = 1;

  // solver
  double tol = 1e-6;
  int max_iter = 3000;
  double nu = 1.4;
  double tau = 20.0;
  GammaMode gamma_mode = GammaMode::kTheory;
  double gamma0 = 0.447;
  double k_factor = 10.0;
  bool monitor_lyapunov = false;
  bool baseline = false;
  bool baseline_extrapolate = true;
  bool write_traces = true;

  // measurements
  double sigma = 1e-3;

  // reconstruction suite
  std::string signal_kind = "smooth_sinusoid";
  std::filesystem::path signal_file;  // overrides signal_kind when set
  int signal_length = 2000;
  double rate = 0.4;

  // single suite
  std::filesystem::path instance_file;
};

using ConfigValues = std::map<std::string, std::string>;

/// Reads `key = value` lines; '#' starts a comment.
ConfigValues read_config_file(const std::filesystem::path& path);

/// Applies `file` then `flags` (flags win) over the defaults and validates.
/// Unknown keys and invalid values raise ParseError naming the key.
ExperimentConfig parse_config(const ConfigValues& file, const ConfigValues& flags = {});

std::vector<std::string> config_keys();

struct RunTrace {
  int case_id = 0;
  int run = 0;
  std::string algorithm;
  ConvergenceTrace trace;
};

struct SuiteResult {
  std::vector<BenchReport> reports;
  std::vector<RunTrace> traces;
  int threads = 1;
};

/// 20 log10(|u| / |u - u_hat|); kInfinity when u_hat == u. DomainError when u = 0.
double snr_db(const Vector& u, const Vector& u_hat);

/// Solver parameters for one problem under the config's gamma mode.
SolverParams solver_params_for(const ExperimentConfig& config, const SplittingProblem& problem);

/// Runs every (case, run) pair. Per-run seeds are derive_seed(seed_base, case, run).
/// Divergent runs are reported, never thrown.
SuiteResult run_suite(const ExperimentConfig& config);

/// Cases the config resolves to (defaults filled in).
std::vector<int> resolved_cases(const ExperimentConfig& config);

inline const std::vector<std::string>& runs_csv_columns() {
  static const std::vector<std::string> cols{
      "case_id", "run",        "algorithm",       "kind",          "m",
      "d",       "s",          "seed",            "iterations",    "error_vs_ground_truth",
      "snr_db",  "final_objective", "stationarity_gap", "wall_time_s", "terminated_by"};
  return cols;
}

inline const std::vector<std::string>& summary_csv_columns() {
  static const std::vector<std::string> cols{
      "case_id",         "algorithm", "kind",       "m",           "d",       "s",
      "runs",            "converged_runs", "mean_iterations", "mean_error", "mean_snr_db",
      "wall_time_s",     "threads"};
  return cols;
}

inline const std::vector<std::string>& trace_csv_columns() {
  static const std::vector<std::string> cols{"n",  "lyapunov", "objective", "dx",
                                             "dz", "dw",       "rel_change", "gamma"};
  return cols;
}

/// Writes summary.csv, runs.csv and one trace_<case>_<run>.csv per trace
/// (baseline traces get an _<algorithm> suffix).
void write_report(const std::vector<BenchReport>& reports, const std::vector<RunTrace>& traces,
                  const std::filesystem::path& output_dir, int threads = 1);

/// 17-significant-digit decimal; "inf"/"-inf" for infinities.
std::string format_real(double v);

}  // namespace bdr
