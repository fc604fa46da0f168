#include "bdr/bench.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include "bdr/cs_problem.hpp"
#include "bdr/solver.hpp"

namespace bdr {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const std::string& why) {
  throw ParseError("config key '" + key + "': " + why + " (got '" + value + "')");
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const char* first = v.data();
  const char* last = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last || !std::isfinite(out)) bad_value(key, v, "not a number");
  return out;
}

long long to_int(const std::string& key, const std::string& v) {
  long long out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) bad_value(key, v, "not an integer");
  return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) bad_value(key, v, "not an unsigned integer");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  bad_value(key, v, "not a boolean");
}

std::vector<int> to_int_list(const std::string& key, const std::string& v) {
  std::vector<int> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(static_cast<int>(to_int(key, item)));
  }
  return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::string&)>;

const std::vector<std::pair<std::string, Setter>>& setters() {
  static const std::vector<std::pair<std::string, Setter>> table{
      {"suite", [](auto& c, auto&, auto& v) { c.suite = suite_from_string(v); }},
      {"case_ids", [](auto& c, auto& k, auto& v) { c.case_ids = to_int_list(k, v); }},
      {"runs", [](auto& c, auto& k, auto& v) { c.runs = static_cast<int>(to_int(k, v)); }},
      {"lambda", [](auto& c, auto& k, auto& v) { c.lambda = to_double(k, v); }},
      {"seed_base", [](auto& c, auto& k, auto& v) { c.seed_base = to_u64(k, v); }},
      {"output_dir", [](auto& c, auto&, auto& v) { c.output_dir = v; }},
      {"scale", [](auto& c, auto& k, auto& v) { c.scale = to_double(k, v); }},
      {"threads", [](auto& c, auto& k, auto& v) { c.threads = static_cast<int>(to_int(k, v)); }},
      {"tol", [](auto& c, auto& k, auto& v) { c.tol = to_double(k, v); }},
      {"max_iter", [](auto& c, auto& k, auto& v) { c.max_iter = static_cast<int>(to_int(k, v)); }},
      {"nu", [](auto& c, auto& k, auto& v) { c.nu = to_double(k, v); }},
      {"tau", [](auto& c, auto& k, auto& v) { c.tau = to_double(k, v); }},
      {"gamma_mode",
       [](auto& c, auto& k, auto& v) {
         if (v == "theory") {
           c.gamma_mode = GammaMode::kTheory;
         } else if (v == "heuristic") {
           c.gamma_mode = GammaMode::kHeuristic;
         } else {
           bad_value(k, v, "expected theory or heuristic");
         }
       }},
      {"gamma0", [](auto& c, auto& k, auto& v) { c.gamma0 = to_double(k, v); }},
      {"k_factor", [](auto& c, auto& k, auto& v) { c.k_factor = to_double(k, v); }},
      {"monitor_lyapunov", [](auto& c, auto& k, auto& v) { c.monitor_lyapunov = to_bool(k, v); }},
      {"baseline", [](auto& c, auto& k, auto& v) { c.baseline = to_bool(k, v); }},
      {"baseline_extrapolate",
       [](auto& c, auto& k, auto& v) { c.baseline_extrapolate = to_bool(k, v); }},
      {"write_traces", [](auto& c, auto& k, auto& v) { c.write_traces = to_bool(k, v); }},
      {"sigma", [](auto& c, auto& k, auto& v) { c.sigma = to_double(k, v); }},
      {"signal_kind", [](auto& c, auto&, auto& v) { c.signal_kind = v; }},
      {"signal_file", [](auto& c, auto&, auto& v) { c.signal_file = v; }},
      {"signal_length",
       [](auto& c, auto& k, auto& v) { c.signal_length = static_cast<int>(to_int(k, v)); }},
      {"rate", [](auto& c, auto& k, auto& v) { c.rate = to_double(k, v); }},
      {"instance_file", [](auto& c, auto&, auto& v) { c.instance_file = v; }},
  };
  return table;
}

void apply(ExperimentConfig& c, const ConfigValues& values) {
  for (const auto& [key, value] : values) {
    const auto& table = setters();
    auto it = std::find_if(table.begin(), table.end(), [&](const auto& p) { return p.first == key; });
    if (it == table.end()) throw ParseError("unknown config key '" + key + "'");
    try {
      it->second(c, key, value);
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      bad_value(key, value, e.what());
    }
  }
}

void validate(const ExperimentConfig& c) {
  auto require = [](bool ok, const std::string& key, const std::string& why) {
    if (!ok) throw ParseError("config key '" + key + "': " + why);
  };
  require(c.runs >= 1, "runs", "must be >= 1");
  require(c.lambda > 0.0, "lambda", "must be positive");
  require(c.scale > 0.0 && c.scale <= 1.0, "scale", "must be in (0, 1]");
  require(c.threads >= 1, "threads", "must be >= 1");
  require(c.tol > 0.0, "tol", "must be positive");
  require(c.max_iter >= 1, "max_iter", "must be >= 1");
  require(c.nu > 0.0 && c.nu < 2.0, "nu", "must be in (0, 2)");
  require(c.tau > 0.0, "tau", "must be positive");
  require(c.gamma0 > 0.0, "gamma0", "must be positive");
  require(c.k_factor > 0.0, "k_factor", "must be positive");
  require(c.sigma >= 0.0, "sigma", "must be nonnegative");
  require(c.rate > 0.0 && c.rate <= 1.0, "rate", "must be in (0, 1]");
  require(c.signal_length >= 8, "signal_length", "must be >= 8");
  if (c.signal_file.empty()) {
    try {
      signal_kind_from_string(c.signal_kind);
    } catch (const ParseError& e) {
      require(false, "signal_kind", e.what());
    }
  }
  for (int id : c.case_ids) {
    if (c.suite == Suite::kGaussianCases) require(id >= 1 && id <= 10, "case_ids", "gaussian cases are 1-10");
    if (c.suite == Suite::kPdctCases) require(id >= 11 && id <= 20, "case_ids", "pdct cases are 11-20");
  }
  if (c.suite == Suite::kSingle) require(!c.instance_file.empty(), "instance_file", "required for suite=single");
}

std::string format_optional(const std::optional<double>& v) {
  return v ? format_real(*v) : std::string();
}

void write_csv_row(std::ostream& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
  out << '\n';
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

struct Job {
  int case_id = 0;
  int run = 0;
};

struct JobOutput {
  std::vector<BenchReport> reports;
  std::vector<RunTrace> traces;
};

BenchReport solve_and_measure(const ExperimentConfig& config, const CsInstance& inst,
                              const Vector* signal, int case_id, int run,
                              const std::string& algorithm, std::vector<RunTrace>& traces) {
  BenchReport rep;
  rep.case_id = case_id;
  rep.run = run;
  rep.algorithm = algorithm;
  rep.kind = to_string(inst.kind);
  rep.m = inst.a.rows();
  rep.d = inst.a.cols();
  rep.seed = inst.seed;
  if (inst.ground_truth && inst.kind != InstanceKind::kReconstruction) {
    rep.s = (inst.ground_truth->array() != 0.0).count();
  }

  const auto start = std::chrono::steady_clock::now();
  try {
    CsProblem problem(inst.a, inst.b, inst.lambda, inst.lambda);
    BdrResult result;
    if (algorithm == "bdr") {
      result = bdr_solve(problem, solver_params_for(config, problem));
    } else {
      PdcaOptions opt;
      opt.tol = config.tol;
      opt.max_iter = config.max_iter;
      opt.extrapolate = config.baseline_extrapolate;
      result = baseline_pdca_solve(problem, opt);
    }
    const Vector& z = result.state.z;
    rep.iterations = static_cast<int>(result.trace.size());
    rep.terminated_by = result.terminated_by;
    rep.final_objective = objective_value(problem, z);
    rep.stationarity_gap = result.stationarity_gap;
    if (inst.ground_truth) {
      const Vector& xg = *inst.ground_truth;
      rep.error_vs_ground_truth = (z - xg).norm() / xg.norm();
      if (inst.kind == InstanceKind::kReconstruction && signal != nullptr) {
        rep.snr_db = snr_db(*signal, Dct(signal->size()).inverse(z));
      } else {
        rep.snr_db = snr_db(xg, z);
      }
    }
    traces.push_back(RunTrace{case_id, run, algorithm, std::move(result.trace)});
  } catch (const DivergenceError&) {
    rep.terminated_by = Termination::kDivergence;
    rep.iterations = config.max_iter;
    rep.final_objective = kInfinity;
    if (inst.ground_truth) rep.error_vs_ground_truth = kInfinity;
    rep.snr_db = -kInfinity;
  }
  rep.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

Vector reconstruction_signal(const ExperimentConfig& config) {
  if (!config.signal_file.empty()) return load_signal_csv(config.signal_file);
  return synthetic_signal(signal_kind_from_string(config.signal_kind), config.signal_length,
                          derive_seed(config.seed_base, 0));
}

}  // namespace

std::string to_string(Suite s) {
  switch (s) {
    case Suite::kGaussianCases:
      return "gaussian_cases";
    case Suite::kPdctCases:
      return "pdct_cases";
    case Suite::kReconstruction:
      return "reconstruction";
    case Suite::kSingle:
      return "single";
  }
  return "unknown";
}

Suite suite_from_string(const std::string& s) {
  if (s == "gaussian_cases" || s == "gaussian") return Suite::kGaussianCases;
  if (s == "pdct_cases" || s == "pdct") return Suite::kPdctCases;
  if (s == "reconstruction") return Suite::kReconstruction;
  if (s == "single") return Suite::kSingle;
  throw ParseError("config key 'suite': unknown suite '" + s + "'");
}

ConfigValues read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read config file " + path.string());
  ConfigValues out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError(path.string() + ":" + std::to_string(lineno) + ": expected key = value");
    }
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

ExperimentConfig parse_config(const ConfigValues& file, const ConfigValues& flags) {
  ExperimentConfig c;
  apply(c, file);
  apply(c, flags);
  validate(c);
  return c;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& [k, _] : setters()) keys.push_back(k);
  return keys;
}

std::string format_real(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  std::array<char, 40> buf{};
  std::snprintf(buf.data(), buf.size(), "%.17g", v);
  return buf.data();
}

double snr_db(const Vector& u, const Vector& u_hat) {
  require_same_size(u, u_hat, "snr_db");
  const double signal = u.norm();
  if (signal == 0.0) throw DomainError("snr_db: reference signal is zero");
  const double err = (u - u_hat).norm();
  if (err == 0.0) return kInfinity;
  return 20.0 * std::log10(signal / err);
}

SolverParams solver_params_for(const ExperimentConfig& config, const SplittingProblem& problem) {
  SolverParams p;
  p.nu = config.nu;
  p.tau = config.tau;
  p.rho = problem.weak_convexity_rho();
  p.ell = problem.lipschitz_ell();
  p.tol = config.tol;
  p.max_iter = config.max_iter;
  p.monitor_lyapunov = config.monitor_lyapunov;
  p.gamma0 = config.gamma0;
  p.k_factor = config.k_factor;
  p.adapt_gamma = config.gamma_mode == GammaMode::kHeuristic;
  p.gamma = p.adapt_gamma ? p.k_factor * p.gamma0 : theory_gamma(p.nu, p.rho, p.ell);
  return p;
}

std::vector<int> resolved_cases(const ExperimentConfig& config) {
  if (!config.case_ids.empty()) return config.case_ids;
  switch (config.suite) {
    case Suite::kGaussianCases:
      return {1};
    case Suite::kPdctCases:
      return {11};
    default:
      return {0};
  }
}

SuiteResult run_suite(const ExperimentConfig& config) {
  validate(config);
  std::vector<Job> jobs;
  const int runs = config.suite == Suite::kSingle ? 1 : config.runs;
  for (int case_id : resolved_cases(config)) {
    for (int run = 0; run < runs; ++run) jobs.push_back({case_id, run});
  }

  std::optional<Vector> signal;
  std::optional<CsInstance> single;
  if (config.suite == Suite::kReconstruction) signal = reconstruction_signal(config);
  if (config.suite == Suite::kSingle) single = read_instance(config.instance_file);

  std::vector<JobOutput> outputs(jobs.size());
  auto run_job = [&](std::size_t idx) {
    const Job& job = jobs[idx];
    JobOutput& out = outputs[idx];
    const std::uint64_t seed =
        derive_seed(config.seed_base, static_cast<std::uint64_t>(job.case_id),
                    static_cast<std::uint64_t>(job.run));
    CsInstance inst;
    const Vector* sig = nullptr;
    switch (config.suite) {
      case Suite::kGaussianCases:
      case Suite::kPdctCases:
        inst = make_case_instance(scaled_case(job.case_id, config.scale), seed, config.lambda,
                                  config.sigma);
        break;
      case Suite::kReconstruction:
        inst = make_reconstruction_instance(
            make_reconstruction_spec(*signal, config.rate, config.sigma, seed), config.lambda);
        sig = &*signal;
        break;
      case Suite::kSingle:
        inst = *single;
        break;
    }
    out.reports.push_back(
        solve_and_measure(config, inst, sig, job.case_id, job.run, "bdr", out.traces));
    if (config.baseline) {
      out.reports.push_back(
          solve_and_measure(config, inst, sig, job.case_id, job.run, "pdca", out.traces));
    }
  };

  const int threads = std::max(1, std::min<int>(config.threads, static_cast<int>(jobs.size())));
  if (threads == 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) run_job(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
          try {
            run_job(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
  }

  SuiteResult result;
  result.threads = config.threads;
  for (auto& out : outputs) {
    for (auto& r : out.reports) result.reports.push_back(std::move(r));
    if (!config.write_traces) continue;
    for (auto& t : out.traces) result.traces.push_back(std::move(t));
  }
  return result;
}

void write_report(const std::vector<BenchReport>& reports, const std::vector<RunTrace>& traces,
                  const std::filesystem::path& output_dir, int threads) {
  std::error_code ec;
  std::filesystem::create_directories(output_dir, ec);
  if (ec) throw std::runtime_error("cannot create " + output_dir.string() + ": " + ec.message());

  {
    auto out = open_out(output_dir / "runs.csv");
    write_csv_row(out, runs_csv_columns());
    for (const auto& r : reports) {
      write_csv_row(out, {std::to_string(r.case_id), std::to_string(r.run), r.algorithm, r.kind,
                          std::to_string(r.m), std::to_string(r.d), std::to_string(r.s),
                          std::to_string(r.seed), std::to_string(r.iterations),
                          format_optional(r.error_vs_ground_truth), format_optional(r.snr_db),
                          format_real(r.final_objective), format_real(r.stationarity_gap),
                          format_real(r.wall_time_s), to_string(r.terminated_by)});
    }
    if (!out) throw std::runtime_error("write failed for " + (output_dir / "runs.csv").string());
  }

  {
    auto out = open_out(output_dir / "summary.csv");
    write_csv_row(out, summary_csv_columns());
    // Group by (case, algorithm) in first-seen order.
    std::vector<std::pair<int, std::string>> groups;
    for (const auto& r : reports) {
      std::pair<int, std::string> key{r.case_id, r.algorithm};
      if (std::find(groups.begin(), groups.end(), key) == groups.end()) groups.push_back(key);
    }
    for (const auto& [case_id, algorithm] : groups) {
      const BenchReport* first = nullptr;
      int n = 0, ok = 0, n_err = 0, n_snr = 0;
      double it = 0, err = 0, snr = 0, time = 0;
      for (const auto& r : reports) {
        if (r.case_id != case_id || r.algorithm != algorithm) continue;
        if (!first) first = &r;
        ++n;
        time += r.wall_time_s;
        if (r.terminated_by == Termination::kDivergence) continue;
        ++ok;
        it += r.iterations;
        if (r.error_vs_ground_truth) {
          err += *r.error_vs_ground_truth;
          ++n_err;
        }
        if (r.snr_db) {
          snr += *r.snr_db;
          ++n_snr;
        }
      }
      write_csv_row(out, {std::to_string(case_id), algorithm, first->kind,
                          std::to_string(first->m), std::to_string(first->d),
                          std::to_string(first->s), std::to_string(n), std::to_string(ok),
                          ok ? format_real(it / ok) : "", n_err ? format_real(err / n_err) : "",
                          n_snr ? format_real(snr / n_snr) : "", format_real(time / n),
                          std::to_string(threads)});
    }
  }

  for (const auto& t : traces) {
    std::string name = "trace_" + std::to_string(t.case_id) + "_" + std::to_string(t.run);
    if (t.algorithm != "bdr") name += "_" + t.algorithm;
    auto out = open_out(output_dir / (name + ".csv"));
    write_csv_row(out, trace_csv_columns());
    for (const auto& row : t.trace) {
      write_csv_row(out, {std::to_string(row.n), format_optional(row.lyapunov),
                          format_real(row.objective_at_z), format_real(row.dx),
                          format_real(row.dz), format_real(row.dw), format_real(row.rel_change),
                          format_real(row.gamma_used)});
    }
  }
}

}  // namespace bdr
