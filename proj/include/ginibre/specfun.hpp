#pragma once

#include <cstdint>
#include <limits>

namespace ginibre::specfun {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// ln Γ(x) for x > 0, with relative accuracy near the zeros at x = 1, 2.
double log_gamma(double x);

/// lgamma(n + 1) − [(n + ½) ln n − n + ½ ln 2π]: the Stirling remainder of n!.
/// Accurate for all n > 0, including large n where the direct difference
/// would cancel catastrophically.
double stirling_remainder(double n);

/// x − ln(1 + x), evaluated without cancellation near x = 0. Requires x > −1.
double log1pmx_neg(double x);

/// Regularized lower incomplete gamma P(k, x) = γ(k, x) / Γ(k).
/// Series for x < k + 1, continued fraction above. x may be +∞.
double regularized_gamma_lower(double k, double x);

/// Regularized upper incomplete gamma Q(k, x) = 1 − P(k, x), computed
/// directly rather than by subtraction.
double regularized_gamma_upper(double k, double x);

/// P(lo ≤ s_k ≤ hi) for s_k a sum of k unit-mean exponentials.
/// `hi` may be +∞. Result clamped to [0, 1].
double gamma_interval_prob(double k, double lo, double hi);

/// ln[x^k e^{−x} / Γ(k + 1)] without the cancellation of the naive form
/// (the exponent is assembled from x/k − 1 − ln(x/k) and the Stirling
/// remainder). Returns −∞ at x = 0.
double gamma_log_prefix(double k, double x);

/// Log of the Gamma(k, 1) density at s > 0.
double gamma_log_pdf(double k, double s);

/// ln[Γ(x+1)² / (Γ(x+h+1) Γ(x−h+1))] for 0 ≤ h ≤ x. The ratio lies in
/// (0, 1]; the Stirling leading terms are cancelled analytically so the
/// result carries absolute (not relative-to-x ln x) error.
double log_central_gamma_ratio(double x, double h);

/// Stirling number of the second kind S(n, k) for 0 ≤ n ≤ 30.
/// Values that do not fit in 64 bits throw std::overflow_error.
std::uint64_t stirling2(int n, int k);

/// Standard normal CDF and density.
double std_normal_cdf(double x);
double std_normal_pdf(double x);

/// Upper tail 1 − Φ(x), accurate for large positive x.
double std_normal_sf(double x);

}  // namespace ginibre::specfun
