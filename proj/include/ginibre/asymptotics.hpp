#pragma once

#include <optional>
#include <string>
#include <variant>

#include "ginibre/angular.hpp"
#include "ginibre/radial.hpp"

namespace ginibre::asymptotics {

using Window = std::variant<radial::ModulusInterval, angular::ArcWindow>;

/// ½ ∫₀¹ f′(r) g′(r) r dr, the large-N covariance of smooth radial statistics.
double radial_smooth_limit(const radial::RadialTestFunction& f,
                           const radial::RadialTestFunction& g);

/// Σ_k k² f̂(k) ĝ(−k); the angular covariance grows like (log N / 4) times this.
angular::cplx angular_smooth_coeff(const angular::FourierStatistic& f,
                                   const angular::FourierStatistic& g);
angular::cplx angular_smooth_prediction(const angular::FourierStatistic& f,
                                        const angular::FourierStatistic& g, int n);

/// Crossover profile of the arc-count variance at √N · arc = β (radians):
/// ∫₀¹ (1 − e^{−βx²}) / (2√x) dx + β ∫₀¹ ∫_{β√x}^∞ e^{−θ²} dθ dx.
/// Tends to 1 as β → ∞ but is not monotone (local maximum near β = 1.2).
double i_arg(double beta);

/// The same profile with e^{−β² x} in the first term, which is what the
/// Riemann-sum limit of the kernel sums produces. It tends to the Poisson
/// value β√π/2 as β → 0 and approaches 1 like 1/β, and it tracks the exact
/// finite-N variance where the form above does not.
double i_arg_corrected(double beta);

/// Crossover profile of the annulus-count variance at √N (b − a) = c:
/// √π ∫ G(x)(1 − G(x)) dx with G(x) = Φ(x + 2c) − Φ(x).
double i_mod(double c);

enum class Regime { fixed, supercritical, critical, subcritical };
std::string_view to_string(Regime r);

/// Scaled widths √N·width below kCriticalLow are subcritical, above
/// kCriticalHigh supercritical. Windows covering at least kFixedWidth of
/// their natural range (the unit interval of moduli, or the full circle)
/// count as fixed.
inline constexpr double kCriticalLow = 0.1;
inline constexpr double kCriticalHigh = 10.0;
inline constexpr double kFixedWidth = 0.05;

struct RegimeReport {
  int n = 0;
  Window window;
  Regime regime = Regime::fixed;
  double width = 0.0;         // b − a, or arc length in radians
  double scaled_width = 0.0;  // √N · width
  double predicted = 0.0;     // leading-order formula for this regime
  double exact = 0.0;         // exact finite-N variance
  double ratio = 0.0;         // exact / predicted
  double exact_mean = 0.0;
  std::string formula;
  /// Where the leading-order formula is inconsistent with its neighbouring
  /// regimes (radial supercritical constant off by 2, the I_arg exponent),
  /// the consistent alternative and its ratio are reported here.
  std::optional<double> alternative_prediction;
  std::optional<double> alternative_ratio;
  std::string alternative_formula;
};

/// Regime tag from N, the window width, and the width of the full range
/// (1 for moduli, 2π for arcs).
Regime classify(int n, double width, double full_range = 1.0);

/// Complex ensemble only.
RegimeReport count_var_prediction(int n, const Window& window);

/// First Edgeworth correction to the density of (s_M − M)/√M:
/// φ(a) [1 + (κ₃ / 6√M)(a³ − 3a)] with κ₃ = 2.
double edgeworth_density(double a, int m);

/// Exact density of (s_M − M)/√M for s_M ~ Gamma(M).
double standardized_gamma_density(double a, int m);

/// sup over a ∈ [−8, 8] (grid step 10⁻³, refined at the maximum) of
/// |edgeworth_density − standardized_gamma_density|.
double edgeworth_sup_error(int m);

}  // namespace ginibre::asymptotics
