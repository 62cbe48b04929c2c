#pragma once

#include <complex>
#include <filesystem>
#include <optional>
#include <vector>

namespace ginibre::angular {

using cplx = std::complex<double>;

/// Band-limited function of the angle, f(θ) = Σ_{|k|≤K} f̂(k) e^{ikθ} with
/// f̂(k) = (1/2π) ∫ e^{−ikθ} f(θ) dθ over physical radians.
class FourierStatistic {
 public:
  static constexpr int kMaxBand = 4096;

  /// `coefficients[j]` holds f̂(j − K); the vector must have odd length
  /// 2K + 1. With `require_real`, conjugate symmetry f̂(−k) = conj f̂(k) is
  /// checked and then imposed exactly.
  static FourierStatistic from_coefficients(std::vector<cplx> coefficients,
                                            bool require_real = false);
  static FourierStatistic constant(double c);
  /// amplitude · cos(kθ) and amplitude · sin(kθ).
  static FourierStatistic cosine(int k, double amplitude = 1.0);
  static FourierStatistic sine(int k, double amplitude = 1.0);
  /// Plain text, one "k re im" triple per line; '#' starts a comment.
  /// Missing k inside the band are zero.
  static FourierStatistic read_file(const std::filesystem::path& path, bool require_real);

  int band() const { return band_; }
  cplx coefficient(int k) const;
  bool real_valued() const { return real_; }
  cplx operator()(double theta) const;
  /// θ ↦ conj f(θ).
  FourierStatistic conjugate() const;

 private:
  int band_ = 0;
  std::vector<cplx> coeffs_;
  bool real_ = true;
};

/// Arc of angles [α, β] in physical radians, −π ≤ α < β ≤ π.
struct ArcWindow {
  double alpha = -3.14159265358979323846;
  double beta = 3.14159265358979323846;

  static ArcWindow symmetric(double length);
  static ArcWindow centered(double center, double length);
  double length() const { return beta - alpha; }
  /// Fourier coefficient of the indicator, ŵ(0) = length / 2π.
  cplx indicator_coefficient(long k) const;

  bool operator==(const ArcWindow&) const = default;
};

void validate(const ArcWindow& arc);

/// φ = f ∗ g̃ with g̃(θ) = g(−θ): the object every covariance formula
/// consumes. φ̂(k) = f̂(k) ĝ(−k); indicator pairs have unbounded band.
class ConvolvedStatistic {
 public:
  static ConvolvedStatistic from_pair(const FourierStatistic& f, const FourierStatistic& g);
  static ConvolvedStatistic from_arcs(const ArcWindow& a1, const ArcWindow& a2);
  /// The tent φ(θ) = (L − |θ|)⁺ / 2π of an arc of length L with itself.
  static ConvolvedStatistic tent(double length);

  cplx coefficient(long k) const;
  cplx at_zero() const { return at_zero_; }
  /// Largest |k| with a nonzero coefficient; empty for unbounded bands.
  std::optional<long> band() const { return band_; }
  bool real_valued() const { return real_; }

 private:
  std::vector<cplx> coeffs_;
  std::optional<long> band_;
  ArcWindow arc1_{}, arc2_{};
  bool arcs_ = false;
  bool real_ = true;
  cplx at_zero_{};
};

/// Σ_{ℓ=0}^{N−1−d} Γ(ℓ + d/2 + 1)² / (ℓ! (ℓ+d)!): the total weight the
/// double sum puts on φ̂(±d).
double diagonal_weight(int n, long d);

/// Cov(X(f), X(g)) = N φ(0) − Σ_{0≤k,ℓ<N} Γ((k+ℓ)/2+1)² φ̂(k−ℓ) / (k! ℓ!).
/// Bilinear in (f, g); real up to rounding when both statistics are real.
cplx angular_cov_exact(const FourierStatistic& f, const FourierStatistic& g, int n);
cplx angular_cov_exact(const ConvolvedStatistic& phi, int n);

/// Var X(f) = Cov(X(f), conj X(f)) for complex-valued f.
double angular_var(const FourierStatistic& f, int n);

struct KernelWeights {
  double a;  // 2^{2ℓ} (ℓ!)² / (2ℓ)!
  double b;  // 2^{2ℓ+1} Γ(ℓ+3/2)² / (2ℓ+1)!
};
KernelWeights kernel_c_weights(int ell);

/// C_ℓ(θ) = a(ℓ) cos^{2ℓ} θ + b(ℓ) cos^{2ℓ+1} θ, normalized so that
/// (1/2π) ∫ C_ℓ dθ = 1.
double kernel_c_eval(int ell, double theta);
/// Ĉ_ℓ(k); zero for |k| > 2ℓ + 1, even in k.
double kernel_c_fourier(int ell, long k);
/// (C_ℓ ∗ φ)(0) = Σ_k Ĉ_ℓ(k) φ̂(k).
cplx kernel_c_apply(int ell, const ConvolvedStatistic& phi);

struct Decomposition {
  cplx main;
  cplx correction;
  cplx total() const { return main + correction; }
};

/// main = N φ(0) − Σ_{ℓ<N} (C_ℓ ∗ φ)(0); correction restores the pairs
/// with an index ≥ N that the kernel sums include, so that
/// main + correction equals the exact covariance.
Decomposition angular_cov_decomposed(const FourierStatistic& f, const FourierStatistic& g,
                                     int n);
Decomposition angular_cov_decomposed(const ConvolvedStatistic& phi, int n);

/// Counting statistics of the eigenvalue arguments.
double angular_count_mean(int n, const ArcWindow& arc);
double angular_count_var(int n, const ArcWindow& arc);
double angular_count_cov(int n, const ArcWindow& arc1, const ArcWindow& arc2);

}  // namespace ginibre::angular
