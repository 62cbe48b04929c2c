#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "ginibre/angular.hpp"
#include "ginibre/ensemble.hpp"

namespace ginibre::mc {

using angular::cplx;

/// Philox4x32-10 counter-based generator. The 64-bit seed is the key, the
/// stream index occupies the upper half of the 128-bit counter and the block
/// number the lower half, so (seed, stream) fixes the whole sample path.
class RngStream {
 public:
  static constexpr const char* kGeneratorName = "philox4x32-10";

  RngStream(std::uint64_t seed, std::uint64_t stream);

  static std::array<std::uint32_t, 4> philox(std::array<std::uint32_t, 4> counter,
                                             std::array<std::uint32_t, 2> key);

  std::uint32_t next_u32();
  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform();
  /// Standard normal (Box–Muller; pairs are cached).
  double normal();
  /// Gamma(shape, 1): Marsaglia–Tsang for shape ≥ 1, boosted below.
  double gamma(double shape);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int used_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Moduli √(s_k / N) (complex) or √(s_{2k} / 2N) (quaternion), k = 1..N,
/// from independent gamma draws. Unordered as a set.
std::vector<double> sample_radial_moduli(int n, Ensemble ens, RngStream& rng);

/// Row-major N×N matrix of independent complex Gaussians with E|a|² = 1/N.
std::vector<cplx> sample_ginibre_matrix(int n, RngStream& rng);

/// Eigenvalues of a Ginibre matrix via eig_dense. N ≤ 512.
std::vector<cplx> sample_ginibre_eigenvalues(int n, RngStream& rng);

inline constexpr int kMaxEigenDimension = 512;

/// All eigenvalues of a row-major n×n complex matrix: Householder reduction
/// to Hessenberg form, then single-shift complex QR with deflation. Throws
/// NumericalError after 30·n iterations without convergence.
std::vector<cplx> eig_dense(const std::vector<cplx>& a, int n);

struct CovEstimate {
  double cov = 0.0;
  double se = 0.0;  // jackknife over replicas
};

/// Unbiased sample covariance with a delete-one jackknife standard error.
CovEstimate estimate_cov(const std::vector<double>& f, const std::vector<double>& g);

struct MeanEstimate {
  double mean = 0.0;
  double se = 0.0;
};
MeanEstimate estimate_mean(const std::vector<double>& f);

struct KsResult {
  double statistic = 0.0;
  double threshold = 0.0;  // 1.63 / √S
  bool pass = false;
};

/// Kolmogorov–Smirnov distance of the studentized sample to N(0, 1).
/// With lattice_step > 0 the data are taken to live on a lattice of that
/// spacing and the empirical CDF at each observed value x is compared with
/// the continuity-corrected Φ((x + step/2 − mean) / sd).
KsResult ks_normal_test(std::vector<double> samples, double lattice_step = 0.0);

/// A linear statistic X = Σ_points f(z). Radial statistics only look at |z|
/// and can be sampled through the gamma representation.
struct Statistic {
  std::string name;
  std::function<double(cplx)> per_point;
  bool radial = false;
};

struct SampleBatch {
  static constexpr std::uint32_t kFormatVersion = 1;

  int n = 0;
  Ensemble ensemble = Ensemble::complex;
  std::uint64_t seed = 0;
  std::string generator = RngStream::kGeneratorName;
  std::string code_version;
  std::vector<std::string> names;
  std::vector<double> values;          // replica-major, names.size() per replica
  std::vector<cplx> eigenvalues;       // replica-major, n per replica; optional

  std::size_t replicas() const { return names.empty() ? 0 : values.size() / names.size(); }
  double value(std::size_t replica, std::size_t stat) const {
    return values[replica * names.size() + stat];
  }
  std::vector<double> column(std::size_t stat) const;

  bool operator==(const SampleBatch&) const = default;
};

struct RunConfig {
  int n = 0;
  Ensemble ensemble = Ensemble::complex;
  std::size_t replicas = 0;
  std::uint64_t seed = 0;
  std::vector<Statistic> statistics;
  bool keep_eigenvalues = false;
  /// Use the matrix sampler even when every statistic is radial.
  bool force_matrix = false;
};

/// Replica r draws from RngStream(seed, r); replicas run in parallel and are
/// stored by index, so the batch does not depend on the thread count.
SampleBatch run_replicas(const RunConfig& config);

/// Binary layout (little-endian): an 80-byte header
///   magic "GINIBRE1", u32 format version, u32 ensemble, u64 N, u64 seed,
///   u64 replicas, u32 statistic count, u32 flags (bit 0: eigenvalues),
///   char[16] generator, char[16] code version,
/// then per statistic a u32 length and its name bytes, then the values as
/// f64, then (if flagged) the eigenvalues as (re, im) f64 pairs.
void write_batch(const SampleBatch& batch, std::ostream& out);
SampleBatch read_batch(std::istream& in);
void save_batch(const SampleBatch& batch, const std::filesystem::path& path);
SampleBatch load_batch(const std::filesystem::path& path);

/// CSV mirror: provenance comment line, header "replica,<names...>", rows.
void write_batch_csv(const SampleBatch& batch, std::ostream& out);

}  // namespace ginibre::mc
