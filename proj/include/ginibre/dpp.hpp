#pragma once

#include <vector>

#include "ginibre/angular.hpp"
#include "ginibre/radial.hpp"

namespace ginibre::dpp {

using angular::cplx;

enum class Structure { diagonal, sector, dense };
std::string_view to_string(Structure s);

/// Restriction of the N-point projection kernel to a region, written in the
/// orthonormal monomial basis: G_{ℓm} = ∫_A ψ_ℓ conj(ψ_m) dμ_N.
class GramOperator {
 public:
  static GramOperator diagonal(std::vector<double> entries);
  /// Row-major n×n entries; must be Hermitian to 1e−12 relative.
  static GramOperator dense(int n, std::vector<cplx> entries, Structure tag = Structure::dense);

  int dimension() const { return n_; }
  Structure structure() const { return structure_; }
  cplx operator()(int row, int col) const;
  /// Diagonal entries (all of them, for any structure).
  std::vector<double> diagonal_entries() const;
  /// Row-major entries; empty for the diagonal structure.
  const std::vector<cplx>& entries() const { return entries_; }

  double trace() const;
  /// Gershgorin enclosure [lo, hi] of the spectrum.
  std::pair<double, double> gershgorin() const;

 private:
  int n_ = 0;
  Structure structure_ = Structure::diagonal;
  std::vector<double> diag_;
  std::vector<cplx> entries_;
};

/// Annulus {a ≤ |z| ≤ b}: diagonal with G_ℓℓ = P(Na² ≤ s_{ℓ+1} ≤ Nb²).
GramOperator gram_annulus(int n, const radial::ModulusInterval& w);
GramOperator gram_annulus(int n, double a, double b);

/// Sector {arg z ∈ arc}: G_ℓm = Γ((ℓ+m)/2 + 1)/√(ℓ! m!) · ŵ(m − ℓ).
GramOperator gram_sector(int n, const angular::ArcWindow& arc);

inline constexpr int kMaxCumulantOrder = 12;

/// Cluster functions U_k and cumulants C_k of the count, k = 1..order
/// (stored at index k − 1).
struct CumulantSet {
  int order = 0;
  std::vector<double> traces;      // Tr(G^k)
  std::vector<double> cluster;     // U_k = (−1)^{k−1} (k−1)! Tr(G^k)
  std::vector<double> cumulants;   // C_n = Σ_k S(n,k) U_k

  double u(int k) const { return cluster.at(static_cast<std::size_t>(k - 1)); }
  double c(int k) const { return cumulants.at(static_cast<std::size_t>(k - 1)); }
};

/// Cumulants of the number of points in the region. C_n is evaluated as
/// Tr κ_n(G), κ_n the n-th Bernoulli cumulant polynomial written in
/// T = G − G² and I − 2G; this equals Σ_k S(n,k) U_k but avoids the
/// factorial cancellation of that sum.
CumulantSet cumulants_from_gram(const GramOperator& g, int n_max);

/// Same quantities for a sum of independent Bernoulli(p_k) indicators.
CumulantSet cumulants_permanental(const std::vector<double>& p, int n_max);

/// Coefficients of the n-th Bernoulli cumulant as a polynomial in
/// t = p(1 − p), with an extra factor (1 − 2p) for odd n ≥ 3.
std::vector<double> bernoulli_cumulant_coefficients(int n);

struct CltCertificate {
  double variance = 0.0;
  std::vector<double> normalized;  // C_n / C_2^{n/2}, n = 3..order
  /// max_n |C_n| / (B_n C_2) with B_n = Σ_k S(n,k) (k−1)! (k−1); the trace
  /// inequalities guarantee this is at most 1.
  double bound_witness = 0.0;
  double tolerance = 0.0;
  bool clt_consistent = false;
};

CltCertificate clt_certificate(const CumulantSet& cs, double tolerance = 0.1);

}  // namespace ginibre::dpp
