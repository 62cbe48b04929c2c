#include "ginibre/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ginibre/error.hpp"
#include "ginibre/quadrature.hpp"
#include "ginibre/specfun.hpp"

namespace ginibre::asymptotics {

namespace {

constexpr double kPi = std::numbers::pi;
const double kSqrtPi = std::sqrt(kPi);
const double kPiThreeHalves = std::pow(kPi, 1.5);

double integrate(const std::function<double(double)>& f, double lo, double hi) {
  return quad::integrate_adaptive(f, lo, hi, 1e-13, 1e-12, 20000).value;
}

}  // namespace

double radial_smooth_limit(const radial::RadialTestFunction& f,
                           const radial::RadialTestFunction& g) {
  if (!f.has_derivative() || !g.has_derivative()) {
    detail::domain_fail("smooth limit needs differentiable test functions");
  }
  return 0.5 * integrate([&](double r) { return f.derivative(r) * g.derivative(r) * r; }, 0.0, 1.0);
}

angular::cplx angular_smooth_coeff(const angular::FourierStatistic& f,
                                   const angular::FourierStatistic& g) {
  const int band = std::min(f.band(), g.band());
  angular::cplx acc{};
  for (int k = 1; k <= band; ++k) {
    acc += static_cast<double>(k) * k *
           (f.coefficient(k) * g.coefficient(-k) + f.coefficient(-k) * g.coefficient(k));
  }
  return acc;
}

angular::cplx angular_smooth_prediction(const angular::FourierStatistic& f,
                                        const angular::FourierStatistic& g, int n) {
  if (n < 1) detail::domain_fail("N must be at least 1");
  return 0.25 * std::log(static_cast<double>(n)) * angular_smooth_coeff(f, g);
}

double i_arg(double beta) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) detail::domain_fail("i_arg: need beta >= 0");
  if (beta == 0.0) return 0.0;
  // Substituting x = u² removes the 1/√x singularity:
  // ∫₀¹ (1 − e^{−βu⁴}) du + β√π ∫₀¹ u erfc(βu) du.
  // e^{−βu⁴} lives in a layer of width β^{−1/4} at u = 0 and is below
  // e^{−4096} past 8 β^{−1/4}.
  const double layer = std::min(1.0, 8.0 / std::sqrt(std::sqrt(beta)));
  const double first =
      integrate([&](double u) { return -std::expm1(-beta * u * u * u * u); }, 0.0, layer) + (1.0 - layer);
  const double edge = std::min(1.0, 12.0 / beta);
  double second = integrate([&](double u) { return u * std::erfc(beta * u); }, 0.0, edge);
  if (edge < 1.0) second += integrate([&](double u) { return u * std::erfc(beta * u); }, edge, 1.0);
  return first + beta * kSqrtPi * second;
}

double i_arg_corrected(double beta) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) detail::domain_fail("i_arg: need beta >= 0");
  if (beta == 0.0) return 0.0;
  // x = u²: ∫₀¹ (1 − e^{−β²u²}) du + β√π ∫₀¹ u erfc(βu) du, and the first
  // piece has the closed form 1 − √π erf(β) / (2β).
  const double first = beta < 1e-4 ? beta * beta / 3.0 - std::pow(beta, 4) / 10.0
                                   : 1.0 - kSqrtPi * std::erf(beta) / (2.0 * beta);
  const double edge = std::min(1.0, 12.0 / beta);
  double second = integrate([&](double u) { return u * std::erfc(beta * u); }, 0.0, edge);
  if (edge < 1.0) second += integrate([&](double u) { return u * std::erfc(beta * u); }, edge, 1.0);
  return first + beta * kSqrtPi * second;
}

double i_mod(double c) {
  if (!(c >= 0.0) || !std::isfinite(c)) detail::domain_fail("i_mod: need c >= 0");
  if (c == 0.0) return 0.0;
  auto integrand = [&](double x) {
    const double g = specfun::std_normal_cdf(x + 2.0 * c) - specfun::std_normal_cdf(x);
    const double outside = specfun::std_normal_cdf(x) + specfun::std_normal_sf(x + 2.0 * c);
    return g * outside;
  };
  constexpr double kReach = 12.0;
  const double lo = -2.0 * c - kReach;
  double total;
  if (2.0 * c > 2.0 * kReach) {
    // Mass sits at the two transitions; the plateau between them is
    // integrated separately so the adaptive rule cannot step over them.
    total = integrate(integrand, lo, -2.0 * c + kReach) +
            integrate(integrand, -2.0 * c + kReach, -kReach) + integrate(integrand, -kReach, kReach);
  } else {
    total = integrate(integrand, lo, kReach);
  }
  return kSqrtPi * total;
}

std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::fixed:
      return "fixed";
    case Regime::supercritical:
      return "mesoscopic-supercritical";
    case Regime::critical:
      return "critical";
    case Regime::subcritical:
      return "subcritical";
  }
  return "unknown";
}

Regime classify(int n, double width, double full_range) {
  if (width >= kFixedWidth * full_range) return Regime::fixed;
  const double scaled = std::sqrt(static_cast<double>(n)) * width;
  if (scaled < kCriticalLow) return Regime::subcritical;
  if (scaled > kCriticalHigh) return Regime::supercritical;
  return Regime::critical;
}

RegimeReport count_var_prediction(int n, const Window& window) {
  if (n < 1) detail::domain_fail("N must be at least 1");
  RegimeReport rep;
  rep.n = n;
  rep.window = window;
  const double root_n = std::sqrt(static_cast<double>(n));
  if (const auto* w = std::get_if<radial::ModulusInterval>(&window)) {
    radial::validate(*w);
    if (!(w->lo > 0.0) || !(w->hi < 1.0)) {
      detail::domain_fail("radial predictions need 0 < a <= b < 1");
    }
    rep.width = w->hi - w->lo;
    rep.regime = classify(n, rep.width);
    rep.exact = radial::radial_count_var(n, w->lo, w->hi);
    rep.exact_mean = radial::radial_count_mean(n, w->lo, w->hi);
    const double a = w->lo, b = w->hi;
    switch (rep.regime) {
      case Regime::fixed:
        rep.predicted = root_n * (a + b) / kSqrtPi;
        rep.formula = "sqrt(N) (a+b) / sqrt(pi)";
        break;
      case Regime::supercritical:
        rep.predicted = root_n * a / kSqrtPi;
        rep.formula = "sqrt(N) a / sqrt(pi)";
        rep.alternative_prediction = root_n * (a + b) / kSqrtPi;
        rep.alternative_formula = "sqrt(N) (a+b) / sqrt(pi)";
        break;
      case Regime::critical:
        rep.predicted = root_n * a / kSqrtPi * i_mod(root_n * rep.width);
        rep.formula = "sqrt(N) a / sqrt(pi) * I_mod(c)";
        break;
      case Regime::subcritical:
        rep.predicted = n * (b * b - a * a);
        rep.formula = "N (b^2 - a^2)";
        break;
    }
  } else {
    const auto& arc = std::get<angular::ArcWindow>(window);
    angular::validate(arc);
    rep.width = arc.length();
    rep.regime = classify(n, rep.width, 2.0 * kPi);
    rep.exact = angular::angular_count_var(n, arc);
    rep.exact_mean = angular::angular_count_mean(n, arc);
    switch (rep.regime) {
      case Regime::fixed:
      case Regime::supercritical:
        rep.predicted = root_n / kPiThreeHalves;
        rep.formula = "sqrt(N) / pi^(3/2)";
        break;
      case Regime::critical:
        rep.predicted = root_n / kPiThreeHalves * i_arg(root_n * rep.width);
        rep.formula = "sqrt(N) / pi^(3/2) * I_arg(beta)";
        rep.alternative_prediction = root_n / kPiThreeHalves * i_arg_corrected(root_n * rep.width);
        rep.alternative_formula = "sqrt(N) / pi^(3/2) * I_arg_corrected(beta)";
        break;
      case Regime::subcritical:
        rep.predicted = n * rep.width / (2.0 * kPi);
        rep.formula = "N * arc / (2 pi)";
        break;
    }
  }
  rep.scaled_width = root_n * rep.width;
  rep.ratio = rep.exact / rep.predicted;
  if (rep.alternative_prediction) rep.alternative_ratio = rep.exact / *rep.alternative_prediction;
  return rep;
}

double edgeworth_density(double a, int m) {
  if (m < 2) detail::domain_fail("edgeworth_density: need M >= 2");
  constexpr double kThirdCumulant = 2.0;
  const double hermite3 = a * a * a - 3.0 * a;
  return specfun::std_normal_pdf(a) *
         (1.0 + kThirdCumulant / (6.0 * std::sqrt(static_cast<double>(m))) * hermite3);
}

double standardized_gamma_density(double a, int m) {
  if (m < 1) detail::domain_fail("standardized_gamma_density: need M >= 1");
  const double root_m = std::sqrt(static_cast<double>(m));
  const double s = m + a * root_m;
  if (s <= 0.0) return 0.0;
  return root_m * std::exp(specfun::gamma_log_pdf(m, s));
}

double edgeworth_sup_error(int m) {
  auto gap = [&](double a) {
    return std::abs(edgeworth_density(a, m) - standardized_gamma_density(a, m));
  };
  constexpr double kStep = 1e-3;
  double best = 0.0, best_a = 0.0;
  for (int i = -8000; i <= 8000; ++i) {
    const double a = i * kStep;
    const double v = gap(a);
    if (v > best) {
      best = v;
      best_a = a;
    }
  }
  // Golden-section refinement around the grid maximum.
  double lo = best_a - kStep, hi = best_a + kStep;
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 60; ++it) {
    const double x1 = hi - ratio * (hi - lo);
    const double x2 = lo + ratio * (hi - lo);
    if (gap(x1) > gap(x2)) {
      hi = x2;
    } else {
      lo = x1;
    }
  }
  return std::max(best, gap(0.5 * (lo + hi)));
}

}  // namespace ginibre::asymptotics
