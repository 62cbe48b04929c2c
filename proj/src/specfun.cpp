#include "ginibre/specfun.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "ginibre/error.hpp"

namespace ginibre::specfun {

namespace {

__extension__ using Wide = unsigned __int128;

constexpr double kHalfLog2Pi = 0.91893853320467274178032973640562;

// B_{2j} / (2j (2j − 1)), j = 1..8.
constexpr std::array<double, 8> kStirlingCoeffs = {
    1.0 / 12.0,         -1.0 / 360.0,        1.0 / 1260.0,       -1.0 / 1680.0,
    1.0 / 1188.0,       -691.0 / 360360.0,   1.0 / 156.0,        -3617.0 / 122400.0};

constexpr double kStirlingThreshold = 12.0;

double stirling_series(double x) {
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  double acc = 0.0;
  for (auto it = kStirlingCoeffs.rbegin(); it != kStirlingCoeffs.rend(); ++it) {
    acc = acc * inv2 + *it;
  }
  return acc * inv;
}

double gamma_prefix(double k, double x) { return std::exp(gamma_log_prefix(k, x)); }

// ζ(j) − 1 for j = 2..kZetaTerms+1, by direct summation to n = 100 plus an
// Euler–Maclaurin tail.
constexpr int kZetaTerms = 48;

std::array<double, kZetaTerms> zeta_minus_one_table() {
  std::array<double, kZetaTerms> out{};
  constexpr double m = 100.0;
  for (int i = 0; i < kZetaTerms; ++i) {
    const double j = i + 2.0;
    double acc = 0.0;
    for (int n = 100 - 1; n >= 2; --n) acc += std::pow(static_cast<double>(n), -j);
    const double mj = std::pow(m, -j);
    acc += m * mj / (j - 1.0) + 0.5 * mj + j * mj / (12.0 * m) -
           j * (j + 1.0) * (j + 2.0) * mj / (720.0 * m * m * m);
    out[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

// ln Γ(2 + z) = (1 − γ) z + Σ_{j≥2} (−1)^j (ζ(j) − 1) z^j / j for |z| ≤ ½.
// Vanishes at z = 0 without cancellation.
double log_gamma_2p(double z) {
  static const std::array<double, kZetaTerms> zeta = zeta_minus_one_table();
  constexpr double kOneMinusEuler = 1.0 - 0.57721566490153286060651209008240;
  double acc = 0.0;
  for (int i = kZetaTerms - 1; i >= 0; --i) {
    const double j = i + 2.0;
    acc = acc * (-z) + zeta[static_cast<std::size_t>(i)] / j;
  }
  return z * (kOneMinusEuler + z * acc);
}

constexpr int kMaxIterations = 1'000'000;
constexpr double kEps = 1e-17;

double lower_series(double k, double x) {
  double term = 1.0;
  double sum = 1.0;
  for (int n = 1; n < kMaxIterations; ++n) {
    term *= x / (k + n);
    sum += term;
    if (term < sum * kEps) return gamma_prefix(k, x) * sum;
  }
  detail::numerical_fail("regularized_gamma: series did not converge for k=" + std::to_string(k));
}

double upper_continued_fraction(double k, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - k;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIterations; ++i) {
    const double an = -i * (i - k);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) return gamma_prefix(k, x) * k * h;
  }
  detail::numerical_fail("regularized_gamma: continued fraction did not converge for k=" +
                         std::to_string(k));
}

void check_shape(double k, double x) {
  if (!(k > 0.0) || std::isnan(x) || x < 0.0) {
    detail::domain_fail("regularized_gamma: need k > 0 and x >= 0");
  }
}

}  // namespace

double gamma_log_prefix(double k, double x) {
  if (x <= 0.0) return -kInf;
  const double r = x / k;
  return -k * log1pmx_neg(r - 1.0) - 0.5 * std::log(2.0 * std::numbers::pi * k) -
         stirling_remainder(k);
}

double stirling_remainder(double n) {
  if (!(n > 0.0)) detail::domain_fail("stirling_remainder: need n > 0");
  if (n >= kStirlingThreshold) return stirling_series(n);
  return log_gamma(n + 1.0) - ((n + 0.5) * std::log(n) - n + kHalfLog2Pi);
}

double log_gamma(double x) {
  if (!(x > 0.0)) detail::domain_fail("log_gamma: need x > 0");
  if (std::isinf(x)) return x;
  if (x >= kStirlingThreshold) {
    return (x - 0.5) * std::log(x) - x + kHalfLog2Pi + stirling_series(x);
  }
  if (x < 0.5) return log_gamma(x + 1.0) - std::log(x);
  if (x < 1.5) return -std::log1p(x - 1.0) + log_gamma_2p(x - 1.0);
  if (x <= 2.5) return log_gamma_2p(x - 2.0);
  // Shift down into [1.5, 2.5]: Γ(x) = (x−1)(x−2)...(x−n) Γ(x − n).
  double shifted = x;
  double product = 1.0;
  while (shifted > 2.5) {
    shifted -= 1.0;
    product *= shifted;
  }
  return log_gamma_2p(shifted - 2.0) + std::log(product);
}

double log1pmx_neg(double x) {
  if (!(x > -1.0)) detail::domain_fail("log1pmx_neg: need x > -1");
  if (std::abs(x) < 0.1) {
    // Σ_{j≥2} (−1)^j x^j / j
    double power = x * x;
    double acc = 0.0;
    for (int j = 2; j < 40; ++j) {
      const double term = power / j;
      acc += (j % 2 == 0) ? term : -term;
      if (std::abs(term) < 1e-20 * std::abs(acc)) break;
      power *= x;
    }
    return acc;
  }
  return x - std::log1p(x);
}

double regularized_gamma_lower(double k, double x) {
  check_shape(k, x);
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x < k + 1.0) return lower_series(k, x);
  return 1.0 - upper_continued_fraction(k, x);
}

double regularized_gamma_upper(double k, double x) {
  check_shape(k, x);
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x < k + 1.0) return 1.0 - lower_series(k, x);
  return upper_continued_fraction(k, x);
}

double gamma_interval_prob(double k, double lo, double hi) {
  if (std::isnan(lo) || std::isnan(hi) || lo < 0.0) {
    detail::domain_fail("gamma_interval_prob: bounds must be non-negative");
  }
  if (lo > hi) detail::domain_fail("gamma_interval_prob: lo > hi");
  if (lo == hi) return 0.0;
  double p;
  if (lo >= k) {
    p = regularized_gamma_upper(k, lo) - regularized_gamma_upper(k, hi);
  } else {
    p = regularized_gamma_lower(k, hi) - regularized_gamma_lower(k, lo);
  }
  return std::clamp(p, 0.0, 1.0);
}

double log_central_gamma_ratio(double x, double h) {
  if (!(h >= 0.0) || !(x >= h)) detail::domain_fail("log_central_gamma_ratio: need 0 <= h <= x");
  if (h == 0.0) return 0.0;
  if (x - h < 1.0) {
    return 2.0 * log_gamma(x + 1.0) - log_gamma(x + h + 1.0) - log_gamma(x - h + 1.0);
  }
  // With ln Γ(y+1) = (y+½) ln y − y + ½ ln 2π + R(y), the ln x and linear
  // terms cancel exactly, leaving only log1p(±h/x) pieces.
  const double u = h / x;
  return -(x + h + 0.5) * std::log1p(u) - (x - h + 0.5) * std::log1p(-u) +
         2.0 * stirling_remainder(x) - stirling_remainder(x + h) - stirling_remainder(x - h);
}

double gamma_log_pdf(double k, double s) {
  if (!(k > 0.0)) detail::domain_fail("gamma_log_pdf: need k > 0");
  if (s <= 0.0) return (k == 1.0 && s == 0.0) ? 0.0 : -kInf;
  // s^{k−1} e^{−s} / Γ(k) = [s^k e^{−s} / Γ(k+1)] · k / s
  return gamma_log_prefix(k, s) + std::log(k / s);
}

std::uint64_t stirling2(int n, int k) {
  if (n < 0 || k < 0) detail::domain_fail("stirling2: negative argument");
  if (n > 30) throw std::overflow_error("stirling2: n > 30 is outside the supported range");
  if (k > n) return 0;
  // Row-by-row recurrence in 128-bit arithmetic; every S(n, k) with n ≤ 30 fits.
  std::array<Wide, 31> row{};
  row[0] = 1;
  for (int m = 1; m <= n; ++m) {
    for (int j = m; j >= 1; --j) row[j] = static_cast<Wide>(j) * row[j] + row[j - 1];
    row[0] = 0;
  }
  const Wide value = row[k];
  if (value > std::numeric_limits<std::uint64_t>::max()) {
    throw std::overflow_error("stirling2: S(" + std::to_string(n) + "," + std::to_string(k) +
                              ") exceeds 64 bits");
  }
  return static_cast<std::uint64_t>(value);
}

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double std_normal_sf(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double std_normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

}  // namespace ginibre::specfun
