#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/sinh_sinh.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "ginibre/asymptotics.hpp"
#include "ginibre/error.hpp"

using namespace ginibre;
using namespace ginibre::asymptotics;
using radial::ModulusInterval;
using RTF = radial::RadialTestFunction;
using angular::ArcWindow;
using angular::FourierStatistic;

namespace {

constexpr double kSqrtPi = 1.7724538509055160273;

using GK = boost::math::quadrature::gauss_kronrod<double, 61>;

// Both profiles by generic adaptive quadrature; the inner Gaussian tail is
// written with erfc.
double i_arg_oracle(double beta, bool squared_beta) {
  auto first = [&](double x) {
    const double e = squared_beta ? beta * beta * x : beta * x * x;
    return -std::expm1(-e) / (2.0 * std::sqrt(x));
  };
  auto second = [&](double x) {
    return beta * 0.5 * kSqrtPi * boost::math::erfc(beta * std::sqrt(x));
  };
  // Substitute x = u² to remove the 1/√x endpoint singularity.
  auto first_u = [&](double u) { return 2.0 * u * first(u * u); };
  return GK::integrate(first_u, 0.0, 1.0, 15, 1e-14) + GK::integrate(second, 0.0, 1.0, 15, 1e-14);
}

double i_mod_oracle(double c) {
  boost::math::quadrature::sinh_sinh<double> integrator;
  auto g = [&](double x) {
    const double hi = 0.5 * boost::math::erfc(-(x + 2.0 * c) / std::numbers::sqrt2);
    const double lo = 0.5 * boost::math::erfc(-x / std::numbers::sqrt2);
    const double G = hi - lo;
    return G * (1.0 - G);
  };
  return kSqrtPi * integrator.integrate(g, 1e-13);
}

double gamma_density_oracle(double a, int m) {
  const double s = m + a * std::sqrt(static_cast<double>(m));
  if (s <= 0.0) return 0.0;
  return std::sqrt(static_cast<double>(m)) * boost::math::gamma_p_derivative(double(m), s);
}

}  // namespace

TEST_CASE("smooth radial limit") {
  const RTF r2 = RTF::polynomial({0, 0, 1});
  const RTF r4 = RTF::polynomial({0, 0, 0, 0, 1});
  CHECK(radial_smooth_limit(r2, r2) == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(radial_smooth_limit(RTF::constant(3.0), r2) == doctest::Approx(0.0));
  CHECK(radial_smooth_limit(r2, r4) == doctest::Approx(2.0 / 3.0).epsilon(1e-13));
  CHECK_THROWS_AS(radial_smooth_limit(RTF::indicator(0.2, 0.4), r2), DomainError);
}

TEST_CASE("smooth angular limit") {
  const auto c1 = FourierStatistic::cosine(1, 2.0);
  const auto c3 = FourierStatistic::cosine(3, 2.0);
  CHECK(angular_smooth_coeff(c1, c1).real() == doctest::Approx(2.0));
  CHECK(angular_smooth_coeff(c3, c3).real() == doctest::Approx(18.0));
  CHECK(std::abs(angular_smooth_coeff(c1, c3)) == doctest::Approx(0.0));
  const auto s1 = FourierStatistic::sine(1, 2.0);
  CHECK(angular_smooth_coeff(s1, s1).real() == doctest::Approx(2.0));
  CHECK(angular_smooth_prediction(c1, c1, 1024).real() ==
        doctest::Approx(std::log(1024.0) / 2.0));
}

TEST_CASE("crossover profiles against generic quadrature") {
  for (double beta : {1e-3, 0.1, 0.7, 1.0, 3.0, 25.0}) {
    CAPTURE(beta);
    CHECK(i_arg(beta) == doctest::Approx(i_arg_oracle(beta, false)).epsilon(1e-10));
    CHECK(i_arg_corrected(beta) == doctest::Approx(i_arg_oracle(beta, true)).epsilon(1e-10));
  }
  for (double c : {1e-3, 0.05, 0.5, 2.0, 7.0, 30.0}) {
    CAPTURE(c);
    CHECK(i_mod(c) == doctest::Approx(i_mod_oracle(c)).epsilon(1e-9));
  }
}

TEST_CASE("crossover profile limits") {
  CHECK(i_arg(0.0) == 0.0);
  CHECK(i_arg_corrected(0.0) == 0.0);
  CHECK(i_mod(0.0) == 0.0);
  // Poisson end: both count variances approach the expected count.
  CHECK(i_arg_corrected(1e-4) / (1e-4 * kSqrtPi / 2.0) == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(i_mod(1e-4) / (2.0 * kSqrtPi * 1e-4) == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(i_arg_corrected(1e4) >= 0.95);
  CHECK(i_arg_corrected(1e4) <= 1.0);
  CHECK(i_arg(1e12) == doctest::Approx(1.0).epsilon(1e-2));
  CHECK(i_arg(1e4) < 0.95);
  // Large β: 1 − Γ(5/4) β^{−1/4} + √π / (4β), from the boundary layer of
  // e^{−βu⁴} and ∫₀^∞ v erfc v dv = 1/4.
  for (double beta : {1e8, 1e12, 1e16, 1e20}) {
    const double expansion = 1.0 - std::tgamma(1.25) * std::pow(beta, -0.25) + kSqrtPi / (4.0 * beta);
    CHECK(1.0 - i_arg(beta) == doctest::Approx(1.0 - expansion).epsilon(1e-7));
  }
  CHECK(i_mod(10.0) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(i_mod(1e4) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK_THROWS_AS(i_mod(-1.0), DomainError);
  CHECK_THROWS_AS(i_arg(-1.0), DomainError);
}

TEST_CASE("literal arc profile dips before approaching one") {
  CHECK(i_arg(1.2) > i_arg(3.0));
  CHECK(i_arg(3.0) < i_arg(30.0));
}

TEST_CASE("crossover profiles are monotone and continuous on a grid") {
  double prev_arg = 0.0, prev_corr = 0.0, prev_mod = 0.0;
  for (int i = 1; i <= 1000; ++i) {
    const double x = 1e-2 * i;
    const double a = i_arg(x), ac = i_arg_corrected(x), m = i_mod(x);
    CAPTURE(x);
    CHECK(ac >= prev_corr);
    CHECK(m >= prev_mod - 1e-12);
    CHECK(a >= 0.0);
    CHECK(a <= 1.0);
    CHECK(ac <= 1.0);
    CHECK(m <= 2.0 + 1e-12);
    CHECK(std::abs(a - prev_arg) < 0.02);
    CHECK(ac - prev_corr < 0.02);
    CHECK(m - prev_mod < 0.04);
    prev_arg = a;
    prev_corr = ac;
    prev_mod = m;
  }
}

TEST_CASE("regime classification") {
  CHECK(classify(10000, 0.4) == Regime::fixed);
  CHECK(classify(10000, 1e-4) == Regime::subcritical);
  CHECK(classify(10000, 1e-3) == Regime::critical);
  CHECK(classify(10000, 0.1) == Regime::fixed);
  CHECK(classify(10000, 0.02) == Regime::critical);
  CHECK(classify(1000000, 0.04) == Regime::supercritical);
  CHECK(classify(10000, 5e-4) == Regime::subcritical);
  CHECK(classify(10000, 1e-5) == Regime::subcritical);
  CHECK(classify(10000, 0.2, 2.0 * std::numbers::pi) == Regime::supercritical);
  CHECK(to_string(Regime::supercritical) == "mesoscopic-supercritical");
}

TEST_CASE("regime reports against exact variances") {
  SUBCASE("radial fixed window") {
    const auto rep = count_var_prediction(10000, ModulusInterval{0.4, 0.8});
    CHECK(rep.regime == Regime::fixed);
    CHECK(rep.predicted == doctest::Approx(100.0 * 1.2 / kSqrtPi));
    CHECK(std::abs(rep.ratio - 1.0) < 0.02);
  }
  SUBCASE("angular fixed arc") {
    const auto rep = count_var_prediction(4096, ArcWindow::symmetric(std::numbers::pi / 2));
    CHECK(rep.regime == Regime::fixed);
    CHECK(rep.predicted == doctest::Approx(64.0 / std::pow(std::numbers::pi, 1.5)));
    CHECK(std::abs(rep.ratio - 1.0) < 0.1);
  }
  SUBCASE("radial critical window") {
    const auto rep = count_var_prediction(10000, ModulusInterval{0.5, 0.52});
    CHECK(rep.regime == Regime::critical);
    CHECK(rep.predicted == doctest::Approx(100.0 * 0.5 / kSqrtPi * i_mod(2.0)));
    CHECK(std::abs(rep.ratio - 1.0) < 0.05);
  }
  SUBCASE("radial supercritical carries the continuous alternative") {
    const auto rep = count_var_prediction(1000000, ModulusInterval{0.5, 0.54});
    CHECK(rep.regime == Regime::supercritical);
    REQUIRE(rep.alternative_ratio.has_value());
    CHECK(std::abs(*rep.alternative_ratio - 1.0) < 0.01);
  }
  SUBCASE("angular critical carries the corrected profile") {
    const auto rep = count_var_prediction(10000, ArcWindow::symmetric(0.01));
    CHECK(rep.regime == Regime::critical);
    REQUIRE(rep.alternative_ratio.has_value());
    CHECK(std::abs(*rep.alternative_ratio - 1.0) < 0.01);
  }
  SUBCASE("subcritical reports var/mean") {
    const auto rep = count_var_prediction(10000, ArcWindow::symmetric(5e-4));
    CHECK(rep.regime == Regime::subcritical);
    CHECK(rep.exact / rep.exact_mean == doctest::Approx(1.0).epsilon(0.05));
  }
  CHECK_THROWS_AS(count_var_prediction(100, ModulusInterval{0.0, 0.5}), DomainError);
  CHECK_THROWS_AS(count_var_prediction(100, ModulusInterval{0.5, 1.5}), DomainError);
}

TEST_CASE("edgeworth correction") {
  for (int m : {2, 25, 400}) CHECK(edgeworth_density(0.0, m) == doctest::Approx(0.3989422804014327));
  CHECK(edgeworth_density(1.3, 1 << 30) == doctest::Approx(std::exp(-0.845) / std::sqrt(2 * std::numbers::pi)).epsilon(1e-4));
  for (double a : {-3.0, -0.5, 0.0, 1.0, 4.0}) {
    CAPTURE(a);
    CHECK(standardized_gamma_density(a, 50) ==
          doctest::Approx(gamma_density_oracle(a, 50)).epsilon(1e-12));
  }
  const double e25 = edgeworth_sup_error(25);
  const double e100 = edgeworth_sup_error(100);
  const double e400 = edgeworth_sup_error(400);
  const double slope = std::log(e400 / e25) / std::log(16.0);
  CHECK(slope == doctest::Approx(-1.0).epsilon(0.15));
  // The sup error is attained somewhere on the grid; recheck it from outside.
  double brute = 0.0;
  for (int i = -8000; i <= 8000; ++i) {
    const double a = 1e-3 * i;
    brute = std::max(brute, std::abs(edgeworth_density(a, 100) - gamma_density_oracle(a, 100)));
  }
  CHECK(e100 >= brute * (1 - 1e-9));
  CHECK(e100 <= brute * 1.01);
  CHECK_THROWS_AS(edgeworth_density(0.0, 1), DomainError);
}
