#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "bdr/core.hpp"

namespace bdr {

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Stable seed for (base, a, b). Adding runs never changes earlier seeds.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0);

/// Portable random stream: std::mt19937_64 (fully specified by the standard)
/// with hand-written distributions so draws are identical across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform01();
  /// Uniform integer in [0, n), unbiased.
  std::uint64_t uniform_index(std::uint64_t n);
  /// Standard normal by Box-Muller.
  double normal();
  /// k distinct indices from [0, n), sorted ascending.
  std::vector<Eigen::Index> sample_without_replacement(Eigen::Index n, Eigen::Index k);

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

// Substream tags used to split one instance seed.
enum class Stream : std::uint64_t { kMatrix = 1, kSupport = 2, kValues = 3, kNoise = 4, kMask = 5 };

std::uint64_t stream_seed(std::uint64_t seed, Stream s);

/// Orthonormal DCT-II matrix D (d x d). D[0,j] = sqrt(1/d),
/// D[k,j] = sqrt(2/d) cos(pi (2j+1) k / (2d)). The inverse transform is D^T.
Matrix dct_matrix(Eigen::Index d);

/// Row k of dct_matrix(d) without forming the full matrix.
Vector dct_row(Eigen::Index d, Eigen::Index k);

class Dct {
 public:
  explicit Dct(Eigen::Index d);
  Eigen::Index size() const { return d_.rows(); }
  const Matrix& matrix() const { return d_; }
  Vector forward(const Vector& u) const;
  Vector inverse(const Vector& x) const;

 private:
  Matrix d_;
};

/// i.i.d. standard normal entries drawn row by row from the kMatrix substream,
/// then each row scaled to unit norm.
Matrix gaussian_matrix(Eigen::Index m, Eigen::Index d, std::uint64_t seed);

/// m distinct rows of dct_matrix(d), in ascending row order.
Matrix pdct_matrix(Eigen::Index m, Eigen::Index d, std::uint64_t seed);

/// s-sparse vector: uniform support, standard normal values.
Vector sparse_ground_truth(Eigen::Index d, Eigen::Index s, std::uint64_t seed);

/// A x_g + sigma z with z standard normal in R^m.
Vector make_measurements(const Matrix& a, const Vector& x_g, double sigma, std::uint64_t seed);

enum class InstanceKind { kGaussian, kPdct, kReconstruction };

std::string to_string(InstanceKind k);
InstanceKind instance_kind_from_string(const std::string& s);

struct CsInstance {
  Matrix a;
  Vector b;
  double lambda = 0.1;
  std::optional<Vector> ground_truth;
  std::uint64_t seed = 0;
  InstanceKind kind = InstanceKind::kGaussian;
};

struct ReconstructionSpec {
  Vector signal;
  std::vector<Eigen::Index> mask;
  double noise_sigma = 1e-3;
  double sampling_rate = 1.0;
  std::uint64_t seed = 0;
};

/// Sorted mask of round(rate * d) distinct indices.
std::vector<Eigen::Index> random_mask(Eigen::Index d, double rate, std::uint64_t seed);

ReconstructionSpec make_reconstruction_spec(Vector signal, double rate, double sigma,
                                            std::uint64_t seed);

/// A = S Psi with S selecting `mask` and Psi the inverse DCT; b holds the
/// noisy observed samples. The ground truth is the DCT of the clean signal,
/// so the signal is recovered as Psi z.
CsInstance make_reconstruction_instance(const ReconstructionSpec& spec, double lambda);

/// |mask| x d selection matrix.
Matrix selection_matrix(Eigen::Index d, const std::vector<Eigen::Index>& mask);

enum class SignalKind { kSmoothSinusoid, kPiecewiseLoad };

SignalKind signal_kind_from_string(const std::string& s);

/// Seeded stand-ins for measured grid signals. Both are compressible under the DCT.
Vector synthetic_signal(SignalKind kind, Eigen::Index d, std::uint64_t seed);

/// One value per line, optional single header line, LF or CRLF.
Vector load_signal_csv(const std::filesystem::path& path);
void write_signal_csv(const std::filesystem::path& path, const Vector& v,
                      const std::string& header = "value");

/// Text container with dims headers and 17-significant-digit values.
void write_instance(const std::filesystem::path& path, const CsInstance& inst);
CsInstance read_instance(const std::filesystem::path& path);

struct TestCase {
  int id = 0;
  InstanceKind kind = InstanceKind::kGaussian;
  Eigen::Index m = 0, d = 0, s = 0;
};

/// Rows of the benchmark table, ids 1-10 Gaussian and 11-20 PDCT.
TestCase table_case(int id);

/// Same case with m, d, s multiplied by `scale` and rounded (at least 1).
TestCase scaled_case(int id, double scale);

/// Builds the case: sensing matrix, s-sparse ground truth, noisy measurements.
CsInstance make_case_instance(const TestCase& tc, std::uint64_t seed, double lambda,
                              double sigma = 1e-3);

}  // namespace bdr
