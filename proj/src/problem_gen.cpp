#include "bdr/problem_gen.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

namespace bdr {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  return mix64(mix64(mix64(base) ^ a) ^ (b * 0xd1b54a32d192ed03ULL));
}

std::uint64_t stream_seed(std::uint64_t seed, Stream s) {
  return derive_seed(seed, 0x5eedULL, static_cast<std::uint64_t>(s));
}

double Rng::uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::uint64_t Rng::uniform_index(std::uint64_t n) {
  if (n == 0) throw ParameterError("uniform_index: empty range");
  // Reject the top partial block so every residue is equally likely.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t r;
  do {
    r = engine_();
  } while (r >= limit);
  return r % n;
}

double Rng::normal() {
  if (spare_) {
    const double v = *spare_;
    spare_.reset();
    return v;
  }
  const double u1 = 1.0 - uniform01();  // (0, 1]
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  return r * std::cos(theta);
}

std::vector<Eigen::Index> Rng::sample_without_replacement(Eigen::Index n, Eigen::Index k) {
  if (k < 0 || k > n) throw ParameterError("sample_without_replacement: need 0 <= k <= n");
  std::vector<Eigen::Index> pool(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
  // Partial Fisher-Yates.
  for (Eigen::Index i = 0; i < k; ++i) {
    const auto j = i + static_cast<Eigen::Index>(uniform_index(static_cast<std::uint64_t>(n - i)));
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
  }
  pool.resize(static_cast<std::size_t>(k));
  std::sort(pool.begin(), pool.end());
  return pool;
}

Vector dct_row(Eigen::Index d, Eigen::Index k) {
  if (d < 1) throw ParameterError("dct_row: d must be >= 1");
  if (k < 0 || k >= d) throw ParameterError("dct_row: row index out of range");
  Vector row(d);
  if (k == 0) {
    row.setConstant(std::sqrt(1.0 / static_cast<double>(d)));
    return row;
  }
  const double scale = std::sqrt(2.0 / static_cast<double>(d));
  for (Eigen::Index j = 0; j < d; ++j) {
    // Reduce the phase exactly in integers before the cosine.
    const long long num = ((2LL * j + 1) * k) % (4LL * d);
    row[j] = scale * std::cos(std::numbers::pi * static_cast<double>(num) /
                              (2.0 * static_cast<double>(d)));
  }
  return row;
}

Matrix dct_matrix(Eigen::Index d) {
  if (d < 1) throw ParameterError("dct_matrix: d must be >= 1");
  Matrix out(d, d);
  for (Eigen::Index k = 0; k < d; ++k) out.row(k) = dct_row(d, k).transpose();
  return out;
}

Dct::Dct(Eigen::Index d) : d_(dct_matrix(d)) {}

Vector Dct::forward(const Vector& u) const {
  if (u.size() != d_.cols()) throw DimensionError("Dct::forward: length mismatch");
  return d_ * u;
}

Vector Dct::inverse(const Vector& x) const {
  if (x.size() != d_.rows()) throw DimensionError("Dct::inverse: length mismatch");
  return d_.transpose() * x;
}

Matrix gaussian_matrix(Eigen::Index m, Eigen::Index d, std::uint64_t seed) {
  if (m < 1 || d < 1) throw ParameterError("gaussian_matrix: m and d must be >= 1");
  Rng rng(stream_seed(seed, Stream::kMatrix));
  Matrix a(m, d);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) a(i, j) = rng.normal();
    a.row(i) /= a.row(i).norm();
  }
  return a;
}

Matrix pdct_matrix(Eigen::Index m, Eigen::Index d, std::uint64_t seed) {
  if (m < 1 || d < 1) throw ParameterError("pdct_matrix: m and d must be >= 1");
  if (m > d) {
    throw ParameterError("pdct_matrix: m=" + std::to_string(m) + " exceeds d=" + std::to_string(d));
  }
  Rng rng(stream_seed(seed, Stream::kMatrix));
  const auto rows = rng.sample_without_replacement(d, m);
  Matrix a(m, d);
  for (Eigen::Index i = 0; i < m; ++i) {
    a.row(i) = dct_row(d, rows[static_cast<std::size_t>(i)]).transpose();
  }
  return a;
}

Vector sparse_ground_truth(Eigen::Index d, Eigen::Index s, std::uint64_t seed) {
  if (s < 1 || s > d) throw ParameterError("sparse_ground_truth: need 1 <= s <= d");
  Rng support_rng(stream_seed(seed, Stream::kSupport));
  Rng value_rng(stream_seed(seed, Stream::kValues));
  Vector x = Vector::Zero(d);
  for (Eigen::Index i : support_rng.sample_without_replacement(d, s)) {
    double v = value_rng.normal();
    while (v == 0.0) v = value_rng.normal();
    x[i] = v;
  }
  return x;
}

Vector make_measurements(const Matrix& a, const Vector& x_g, double sigma, std::uint64_t seed) {
  if (a.cols() != x_g.size()) throw DimensionError("make_measurements: A cols != x_g length");
  if (!(sigma >= 0.0)) throw ParameterError("make_measurements: sigma must be nonnegative");
  Vector b = a * x_g;
  if (sigma == 0.0) return b;
  Rng rng(stream_seed(seed, Stream::kNoise));
  for (Eigen::Index i = 0; i < b.size(); ++i) b[i] += sigma * rng.normal();
  return b;
}

std::string to_string(InstanceKind k) {
  switch (k) {
    case InstanceKind::kGaussian:
      return "gaussian";
    case InstanceKind::kPdct:
      return "pdct";
    case InstanceKind::kReconstruction:
      return "reconstruction";
  }
  return "unknown";
}

InstanceKind instance_kind_from_string(const std::string& s) {
  if (s == "gaussian") return InstanceKind::kGaussian;
  if (s == "pdct") return InstanceKind::kPdct;
  if (s == "reconstruction") return InstanceKind::kReconstruction;
  throw ParseError("unknown instance kind '" + s + "'");
}

std::vector<Eigen::Index> random_mask(Eigen::Index d, double rate, std::uint64_t seed) {
  if (!(rate > 0.0 && rate <= 1.0)) throw ParameterError("random_mask: rate must be in (0, 1]");
  const auto k = static_cast<Eigen::Index>(std::llround(rate * static_cast<double>(d)));
  Rng rng(stream_seed(seed, Stream::kMask));
  return rng.sample_without_replacement(d, k);
}

ReconstructionSpec make_reconstruction_spec(Vector signal, double rate, double sigma,
                                            std::uint64_t seed) {
  ReconstructionSpec spec;
  spec.mask = random_mask(signal.size(), rate, seed);
  spec.signal = std::move(signal);
  spec.noise_sigma = sigma;
  spec.sampling_rate = rate;
  spec.seed = seed;
  return spec;
}

Matrix selection_matrix(Eigen::Index d, const std::vector<Eigen::Index>& mask) {
  Matrix s = Matrix::Zero(static_cast<Eigen::Index>(mask.size()), d);
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i] < 0 || mask[i] >= d) throw ParameterError("selection_matrix: index out of range");
    s(static_cast<Eigen::Index>(i), mask[i]) = 1.0;
  }
  return s;
}

CsInstance make_reconstruction_instance(const ReconstructionSpec& spec, double lambda) {
  const Eigen::Index d = spec.signal.size();
  if (spec.mask.empty()) throw ParameterError("make_reconstruction_instance: empty mask");
  if (!(lambda > 0.0)) throw ParameterError("make_reconstruction_instance: lambda must be positive");
  if (!(spec.noise_sigma >= 0.0)) throw ParameterError("make_reconstruction_instance: negative sigma");
  require_finite(spec.signal, "reconstruction signal");
  for (std::size_t i = 0; i < spec.mask.size(); ++i) {
    if (spec.mask[i] < 0 || spec.mask[i] >= d) {
      throw ParameterError("make_reconstruction_instance: mask index out of range");
    }
    if (i > 0 && spec.mask[i] <= spec.mask[i - 1]) {
      throw ParameterError("make_reconstruction_instance: mask must be sorted and unique");
    }
  }

  const Dct dct(d);
  const auto m = static_cast<Eigen::Index>(spec.mask.size());
  CsInstance inst;
  inst.kind = InstanceKind::kReconstruction;
  inst.lambda = lambda;
  inst.seed = spec.seed;
  // Row i of S Psi is row mask_i of D^T, i.e. column mask_i of D.
  inst.a.resize(m, d);
  for (Eigen::Index i = 0; i < m; ++i) {
    inst.a.row(i) = dct.matrix().col(spec.mask[static_cast<std::size_t>(i)]).transpose();
  }

  Rng rng(stream_seed(spec.seed, Stream::kNoise));
  Vector noisy = spec.signal;
  if (spec.noise_sigma > 0.0) {
    for (Eigen::Index j = 0; j < d; ++j) noisy[j] += spec.noise_sigma * rng.normal();
  }
  inst.b.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) inst.b[i] = noisy[spec.mask[static_cast<std::size_t>(i)]];
  inst.ground_truth = dct.forward(spec.signal);
  return inst;
}

SignalKind signal_kind_from_string(const std::string& s) {
  if (s == "smooth_sinusoid") return SignalKind::kSmoothSinusoid;
  if (s == "piecewise_load") return SignalKind::kPiecewiseLoad;
  throw ParseError("unknown signal kind '" + s + "'");
}

Vector synthetic_signal(SignalKind kind, Eigen::Index d, std::uint64_t seed) {
  if (d < 8) throw ParameterError("synthetic_signal: d must be >= 8");
  Rng rng(seed);
  const double two_pi = 2.0 * std::numbers::pi;
  const auto dd = static_cast<double>(d);
  Vector u = Vector::Zero(d);

  if (kind == SignalKind::kSmoothSinusoid) {
    // Per-unit fundamental with small odd harmonics, 8-12 cycles per window.
    const double cycles = 8.0 + 4.0 * rng.uniform01();
    const double base = 0.8 + 0.2 * rng.uniform01();
    const std::array<std::pair<int, double>, 3> parts{{
        {1, base},
        {3, base * (0.05 + 0.10 * rng.uniform01())},
        {5, base * (0.02 + 0.06 * rng.uniform01())},
    }};
    for (const auto& [harmonic, amp] : parts) {
      const double phase = two_pi * rng.uniform01();
      for (Eigen::Index t = 0; t < d; ++t) {
        u[t] += amp * std::sin(two_pi * harmonic * cycles * static_cast<double>(t) / dd + phase);
      }
    }
    return u;
  }

  // Load profile: level + slow trend + daily cycle + a few slope changes.
  const double level = 1.0 + rng.uniform01();
  const double trend = 0.3 * (rng.uniform01() - 0.5);
  const double days = 5.0 + 3.0 * rng.uniform01();
  const double daily_amp = 0.2 + 0.1 * rng.uniform01();
  const double phase = two_pi * rng.uniform01();
  std::array<double, 3> kink_at{};
  std::array<double, 3> kink_slope{};
  for (std::size_t k = 0; k < kink_at.size(); ++k) {
    kink_at[k] = dd * (0.15 + 0.7 * rng.uniform01());
    kink_slope[k] = 0.4 * (rng.uniform01() - 0.5) / dd;
  }
  for (Eigen::Index t = 0; t < d; ++t) {
    const auto tt = static_cast<double>(t);
    double v = level + trend * tt / dd + daily_amp * std::sin(two_pi * days * tt / dd + phase);
    for (std::size_t k = 0; k < kink_at.size(); ++k) {
      if (tt > kink_at[k]) v += kink_slope[k] * (tt - kink_at[k]);
    }
    u[t] = v;
  }
  return u;
}

namespace {

std::string trim(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
  return s.substr(i);
}

bool parse_double(const std::string& s, double& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

std::string format17(double v) {
  std::array<char, 40> buf{};
  std::snprintf(buf.data(), buf.size(), "%.17g", v);
  return buf.data();
}

}  // namespace

Vector load_signal_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open signal file " + path.string());
  std::vector<double> values;
  std::string line;
  std::size_t lineno = 0;
  bool header_allowed = true;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty()) continue;
    double v = 0.0;
    if (!parse_double(line, v)) {
      // from_chars accepts "nan"/"inf"; anything else on the first line is a header.
      if (header_allowed && values.empty()) {
        header_allowed = false;
        continue;
      }
      throw ParseError(path.string() + ":" + std::to_string(lineno) + ": cannot parse '" + line +
                       "'");
    }
    if (!std::isfinite(v)) {
      throw ParseError(path.string() + ":" + std::to_string(lineno) + ": non-finite value");
    }
    header_allowed = false;
    values.push_back(v);
  }
  if (values.empty()) throw ParseError(path.string() + ": no values");
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

void write_signal_csv(const std::filesystem::path& path, const Vector& v,
                      const std::string& header) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write signal file " + path.string());
  if (!header.empty()) out << header << '\n';
  for (Eigen::Index i = 0; i < v.size(); ++i) out << format17(v[i]) << '\n';
  if (!out) throw ParseError("write failed for " + path.string());
}

void write_instance(const std::filesystem::path& path, const CsInstance& inst) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write instance file " + path.string());
  out << "bdr-instance 1\n";
  out << "kind " << to_string(inst.kind) << '\n';
  out << "seed " << inst.seed << '\n';
  out << "lambda " << format17(inst.lambda) << '\n';
  out << "A " << inst.a.rows() << ' ' << inst.a.cols() << '\n';
  for (Eigen::Index i = 0; i < inst.a.rows(); ++i) {
    for (Eigen::Index j = 0; j < inst.a.cols(); ++j) {
      out << (j ? " " : "") << format17(inst.a(i, j));
    }
    out << '\n';
  }
  auto write_vec = [&](const char* name, const Vector& v) {
    out << name << ' ' << v.size() << '\n';
    for (Eigen::Index i = 0; i < v.size(); ++i) out << (i ? " " : "") << format17(v[i]);
    out << '\n';
  };
  write_vec("b", inst.b);
  write_vec("ground_truth", inst.ground_truth ? *inst.ground_truth : Vector());
  if (!out) throw ParseError("write failed for " + path.string());
}

CsInstance read_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open instance file " + path.string());
  auto fail = [&](const std::string& what) {
    throw ParseError(path.string() + ": " + what);
  };
  auto expect = [&](const std::string& key) {
    std::string k;
    if (!(in >> k) || k != key) fail("expected '" + key + "'");
  };
  auto read_value = [&]() {
    std::string tok;
    double v = 0.0;
    if (!(in >> tok) || !parse_double(tok, v) || !std::isfinite(v)) fail("bad number '" + tok + "'");
    return v;
  };

  CsInstance inst;
  int version = 0;
  expect("bdr-instance");
  if (!(in >> version) || version != 1) fail("unsupported version");
  std::string kind;
  expect("kind");
  in >> kind;
  inst.kind = instance_kind_from_string(kind);
  expect("seed");
  if (!(in >> inst.seed)) fail("bad seed");
  expect("lambda");
  inst.lambda = read_value();

  Eigen::Index m = 0, d = 0;
  expect("A");
  if (!(in >> m >> d) || m < 0 || d < 0) fail("bad A dims");
  inst.a.resize(m, d);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < d; ++j) inst.a(i, j) = read_value();

  auto read_vec = [&](const char* name) {
    expect(name);
    Eigen::Index n = 0;
    if (!(in >> n) || n < 0) fail(std::string("bad length for ") + name);
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = read_value();
    return v;
  };
  inst.b = read_vec("b");
  if (inst.b.size() != m) fail("b length does not match A rows");
  Vector gt = read_vec("ground_truth");
  if (gt.size() > 0) {
    if (gt.size() != d) fail("ground_truth length does not match A cols");
    inst.ground_truth = std::move(gt);
  }
  return inst;
}

TestCase table_case(int id) {
  if (id < 1 || id > 20) throw ParameterError("table_case: id must be in 1..20");
  // Gaussian cases grow linearly; the PDCT column has its own m values.
  static constexpr std::array<Eigen::Index, 10> kPdctM{360,  4320, 4680, 5040, 5400,
                                                       5760, 6120, 6480, 6840, 7200};
  TestCase tc;
  tc.id = id;
  const int k = (id - 1) % 10 + 1;
  tc.d = 1280 * k;
  tc.s = 40 * k;
  if (id <= 10) {
    tc.kind = InstanceKind::kGaussian;
    tc.m = 360 * k;
  } else {
    tc.kind = InstanceKind::kPdct;
    tc.m = kPdctM[static_cast<std::size_t>(k - 1)];
  }
  return tc;
}

TestCase scaled_case(int id, double scale) {
  if (!(scale > 0.0 && scale <= 1.0)) throw ParameterError("scaled_case: scale must be in (0, 1]");
  TestCase tc = table_case(id);
  auto shrink = [scale](Eigen::Index v) {
    return std::max<Eigen::Index>(1, std::llround(scale * static_cast<double>(v)));
  };
  tc.m = shrink(tc.m);
  tc.d = shrink(tc.d);
  tc.s = shrink(tc.s);
  return tc;
}

CsInstance make_case_instance(const TestCase& tc, std::uint64_t seed, double lambda,
                              double sigma) {
  if (tc.kind == InstanceKind::kReconstruction) {
    throw ParameterError("make_case_instance: reconstruction instances need a signal");
  }
  CsInstance inst;
  inst.kind = tc.kind;
  inst.seed = seed;
  inst.lambda = lambda;
  inst.a = tc.kind == InstanceKind::kPdct ? pdct_matrix(tc.m, tc.d, seed)
                                          : gaussian_matrix(tc.m, tc.d, seed);
  Vector x_g = sparse_ground_truth(tc.d, tc.s, seed);
  inst.b = make_measurements(inst.a, x_g, sigma, seed);
  inst.ground_truth = std::move(x_g);
  return inst;
}

}  // namespace bdr
