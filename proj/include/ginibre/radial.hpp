#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "ginibre/ensemble.hpp"

namespace ginibre::radial {

/// Closed interval of moduli [lo, hi]; hi may be +∞.
struct ModulusInterval {
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();

  bool operator==(const ModulusInterval&) const = default;
};

/// Throws DomainError unless 0 ≤ lo ≤ hi.
void validate(const ModulusInterval& w);

/// A real function of the modulus r ≥ 0.
class RadialTestFunction {
 public:
  enum class Kind { polynomial, indicator, callable };

  static constexpr int kMaxDegree = 64;

  /// Σ_j c_j r^j. Even-only coefficient lists are polynomials in r².
  static RadialTestFunction polynomial(std::vector<double> coefficients);
  static RadialTestFunction constant(double c);
  static RadialTestFunction indicator(double a, double b);
  static RadialTestFunction indicator(const ModulusInterval& w);
  /// `f` must be evaluable on [0, r_max] (r_max ≥ 2). Jumps or kinks should
  /// be listed in `breakpoints` so quadrature panels split there.
  static RadialTestFunction callable(std::function<double(double)> f, double r_max,
                                     std::vector<double> breakpoints = {},
                                     std::function<double(double)> derivative = {});

  Kind kind() const { return kind_; }
  double operator()(double r) const;

  bool has_derivative() const;
  double derivative(double r) const;

  /// Polynomial coefficients (empty unless kind() == polynomial).
  const std::vector<double>& coefficients() const { return coeffs_; }
  int degree() const;
  /// Indicator window (meaningful only for kind() == indicator).
  const ModulusInterval& interval() const { return window_; }
  double domain_max() const { return r_max_; }
  std::vector<double> breakpoints() const;

  /// alpha·f + g. Polynomials combine coefficient-wise; anything else
  /// becomes a callable with the union of breakpoints.
  friend RadialTestFunction combine(double alpha, const RadialTestFunction& f,
                                    const RadialTestFunction& g);

 private:
  Kind kind_ = Kind::polynomial;
  std::vector<double> coeffs_;
  ModulusInterval window_{};
  std::function<double(double)> fn_;
  std::function<double(double)> dfn_;
  std::vector<double> breaks_;
  double r_max_ = std::numeric_limits<double>::infinity();
};

/// E[X(f)] = Σ_ℓ E f(r_ℓ) under the ensemble's modulus law.
double radial_mean_exact(const RadialTestFunction& f, int n, Ensemble ens = Ensemble::complex);

/// Cov(X(f), X(g)) = Σ_ℓ Cov f(r_ℓ), g(r_ℓ)); symmetric in (f, g).
double radial_cov_exact(const RadialTestFunction& f, const RadialTestFunction& g, int n,
                        Ensemble ens = Ensemble::complex);

/// p_ℓ = P(r_ℓ ∈ [a, b]) for ℓ = 1..N.
std::vector<double> count_probabilities(int n, const ModulusInterval& w,
                                        Ensemble ens = Ensemble::complex);

double radial_count_mean(int n, double a, double b, Ensemble ens = Ensemble::complex);
double radial_count_var(int n, double a, double b, Ensemble ens = Ensemble::complex);
double radial_count_cov(int n, const ModulusInterval& w1, const ModulusInterval& w2,
                        Ensemble ens = Ensemble::complex);

/// Σ_k ln E exp(λ h(√(s_k / N))) for the complex ensemble. A factor that
/// diverges raises NumericalError naming the first offending k.
double radial_log_mgf(const RadialTestFunction& h, double lambda, int n);

}  // namespace ginibre::radial
