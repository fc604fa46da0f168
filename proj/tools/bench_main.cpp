// Command-line harness for the BDR solver and the compressed-sensing benchmarks.
//
//   bench run --suite gaussian --cases 1,2 --runs 30 --scale 0.1 --out DIR
//   bench reconstruct --signal FILE.csv --rate 0.4 --lambda 0.1 --out DIR
//   bench solve --instance FILE --gamma-mode theory
//   bench make-instance --case 1 --scale 0.1 --seed 7 --out FILE
//   bench make-signal --kind smooth_sinusoid --length 2000 --seed 1 --out FILE.csv

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "bdr/bench.hpp"
#include "bdr/cs_problem.hpp"
#include "bdr/problem_gen.hpp"
#include "bdr/solver.hpp"

namespace {

struct CommonFlags {
  std::string config_file;
  bdr::ConfigValues values;
};

// Registers a flag that, when given, lands in `values[key]`.
CLI::Option* add_value(CLI::App* app, CommonFlags& flags, const std::string& name,
                       const std::string& key, const std::string& help) {
  return app->add_option_function<std::string>(
      name, [&flags, key](const std::string& v) { flags.values[key] = v; }, help);
}

void add_solver_flags(CLI::App* app, CommonFlags& flags) {
  app->add_option("--config", flags.config_file, "flat key = value config file");
  add_value(app, flags, "--seed", "seed_base", "base seed");
  add_value(app, flags, "--tol", "tol", "relative-change stopping tolerance");
  add_value(app, flags, "--max-iter", "max_iter", "iteration cap");
  add_value(app, flags, "--nu", "nu", "relaxation parameter in (0, 2)");
  add_value(app, flags, "--tau", "tau", "dual proximal weight");
  add_value(app, flags, "--threads", "threads", "parallel runs");
  add_value(app, flags, "--lambda", "lambda", "regularization weight");
  add_value(app, flags, "--gamma-mode", "gamma_mode", "theory or heuristic");
  add_value(app, flags, "--gamma0", "gamma0", "heuristic base step");
  add_value(app, flags, "--out", "output_dir", "output directory");
  add_value(app, flags, "--runs", "runs", "repetitions per case");
  add_value(app, flags, "--sigma", "sigma", "measurement noise level");
  app->add_flag_callback(
      "--baseline", [&flags] { flags.values["baseline"] = "true"; }, "also run the pDCA baseline");
  app->add_flag_callback(
      "--lyapunov", [&flags] { flags.values["monitor_lyapunov"] = "true"; },
      "record the merit function in traces");
  app->add_flag_callback(
      "--no-traces", [&flags] { flags.values["write_traces"] = "false"; },
      "skip per-run trace files");
}

bdr::ExperimentConfig load(const CommonFlags& flags) {
  bdr::ConfigValues file;
  if (!flags.config_file.empty()) file = bdr::read_config_file(flags.config_file);
  return bdr::parse_config(file, flags.values);
}

void print_reports(const bdr::SuiteResult& result) {
  for (const auto& r : result.reports) {
    std::cout << "case " << r.case_id << " run " << r.run << " [" << r.algorithm << "]"
              << " iters=" << r.iterations << " error="
              << (r.error_vs_ground_truth ? bdr::format_real(*r.error_vs_ground_truth) : "na")
              << " snr_db=" << (r.snr_db ? bdr::format_real(*r.snr_db) : "na")
              << " terminated_by=" << bdr::to_string(r.terminated_by) << '\n';
  }
}

int run_and_write(const bdr::ExperimentConfig& config) {
  const auto result = bdr::run_suite(config);
  bdr::write_report(result.reports, result.traces, config.output_dir, result.threads);
  print_reports(result);
  std::cout << "wrote " << (config.output_dir / "summary.csv").string() << '\n';
  for (const auto& r : result.reports) {
    if (r.terminated_by == bdr::Termination::kDivergence) return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"BDR splitting solver and compressed-sensing benchmark harness"};
  app.require_subcommand(1);

  CommonFlags run_flags;
  auto* run = app.add_subcommand("run", "run a benchmark suite");
  add_solver_flags(run, run_flags);
  add_value(run, run_flags, "--suite", "suite", "gaussian, pdct, reconstruction or single");
  add_value(run, run_flags, "--cases", "case_ids", "comma-separated case ids");
  add_value(run, run_flags, "--scale", "scale", "down-scaling factor in (0, 1]");

  CommonFlags rec_flags;
  auto* rec = app.add_subcommand("reconstruct", "recover a signal from random noisy samples");
  add_solver_flags(rec, rec_flags);
  add_value(rec, rec_flags, "--signal", "signal_file", "signal CSV (one value per line)");
  add_value(rec, rec_flags, "--kind", "signal_kind", "synthetic signal when --signal is absent");
  add_value(rec, rec_flags, "--length", "signal_length", "synthetic signal length");
  add_value(rec, rec_flags, "--rate", "rate", "sampling rate in (0, 1]");

  CommonFlags solve_flags;
  auto* solve = app.add_subcommand("solve", "solve one instance file");
  add_solver_flags(solve, solve_flags);
  add_value(solve, solve_flags, "--instance", "instance_file", "instance file")->required();

  int case_id = 1;
  double scale = 1.0;
  std::uint64_t seed = 1;
  double lambda = 0.1;
  std::string out_file;
  auto* make_inst = app.add_subcommand("make-instance", "write a benchmark case as an instance file");
  make_inst->add_option("--case", case_id, "case id 1-20")->required();
  make_inst->add_option("--scale", scale, "down-scaling factor");
  make_inst->add_option("--seed", seed, "instance seed");
  make_inst->add_option("--lambda", lambda, "regularization weight");
  make_inst->add_option("--out", out_file, "output file")->required();

  std::string kind = "smooth_sinusoid";
  int length = 2000;
  auto* make_sig = app.add_subcommand("make-signal", "write a synthetic signal CSV");
  make_sig->add_option("--kind", kind, "smooth_sinusoid or piecewise_load");
  make_sig->add_option("--length", length, "number of samples");
  make_sig->add_option("--seed", seed, "signal seed");
  make_sig->add_option("--out", out_file, "output file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return run_and_write(load(run_flags));
    if (*rec) {
      rec_flags.values["suite"] = "reconstruction";
      if (!rec_flags.values.count("gamma_mode")) rec_flags.values["gamma_mode"] = "heuristic";
      return run_and_write(load(rec_flags));
    }
    if (*solve) {
      solve_flags.values["suite"] = "single";
      return run_and_write(load(solve_flags));
    }
    if (*make_inst) {
      const auto inst = bdr::make_case_instance(bdr::scaled_case(case_id, scale), seed, lambda);
      bdr::write_instance(out_file, inst);
      std::cout << "wrote " << out_file << " (" << inst.a.rows() << "x" << inst.a.cols() << ")\n";
      return 0;
    }
    if (*make_sig) {
      bdr::write_signal_csv(out_file,
                            bdr::synthetic_signal(bdr::signal_kind_from_string(kind), length, seed));
      std::cout << "wrote " << out_file << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
