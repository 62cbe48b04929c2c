#include "ginibre/angular.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>

#include "ginibre/error.hpp"
#include "ginibre/parallel.hpp"
#include "ginibre/specfun.hpp"

namespace ginibre::angular {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kArcSlack = 1e-12;
// Terms of the diagonal weights below e^{−700} are dropped.
constexpr double kLogUnderflow = -700.0;
// The multiplicative recurrence is re-anchored on the closed form this often.
constexpr long kReanchor = 256;

void check_n(int n) {
  if (n < 1) detail::domain_fail("N must be at least 1");
}

class ComplexSum {
 public:
  void add(cplx z) {
    re_.add(z.real());
    im_.add(z.imag());
  }
  cplx value() const { return {re_.value(), im_.value()}; }

 private:
  CompensatedSum re_, im_;
};

double circle_overlap(const ArcWindow& a, const ArcWindow& b) {
  double total = 0.0;
  for (int shift = -1; shift <= 1; ++shift) {
    const double lo = std::max(a.alpha, b.alpha + shift * kTwoPi);
    const double hi = std::min(a.beta, b.beta + shift * kTwoPi);
    if (hi > lo) total += hi - lo;
  }
  return std::min(total, kTwoPi);
}

double log_diagonal_term(long ell, long d) {
  return specfun::log_central_gamma_ratio(static_cast<double>(ell) + 0.5 * d, 0.5 * d);
}

}  // namespace

FourierStatistic FourierStatistic::from_coefficients(std::vector<cplx> coefficients,
                                                     bool require_real) {
  if (coefficients.size() % 2 == 0) {
    detail::domain_fail("Fourier coefficient list must have odd length 2K+1");
  }
  const int band = static_cast<int>(coefficients.size() / 2);
  if (band > kMaxBand) {
    detail::domain_fail("Fourier band " + std::to_string(band) + " exceeds the supported " +
                        std::to_string(kMaxBand));
  }
  double scale = 0.0;
  for (const cplx& c : coefficients) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
      detail::domain_fail("Fourier coefficients must be finite");
    }
    scale = std::max(scale, std::abs(c));
  }
  FourierStatistic f;
  f.band_ = band;
  f.coeffs_ = std::move(coefficients);
  const auto at = [&](int k) -> cplx& { return f.coeffs_[static_cast<std::size_t>(k + band)]; };
  bool symmetric = true;
  for (int k = 0; k <= band; ++k) {
    const double gap = std::abs(at(-k) - std::conj(at(k)));
    if (gap != 0.0) symmetric = false;
    if (require_real && gap > 1e-12 * scale) {
      detail::domain_fail("statistic declared real but f(-k) != conj f(k) at k = " +
                          std::to_string(k));
    }
  }
  if (require_real) {
    for (int k = 0; k <= band; ++k) {
      const cplx mean = 0.5 * (at(k) + std::conj(at(-k)));
      at(k) = mean;
      at(-k) = std::conj(mean);
    }
    symmetric = true;
  }
  f.real_ = symmetric;
  return f;
}

FourierStatistic FourierStatistic::constant(double c) { return from_coefficients({cplx(c)}, true); }

FourierStatistic FourierStatistic::cosine(int k, double amplitude) {
  if (k < 0) detail::domain_fail("cosine frequency must be non-negative");
  if (k == 0) return constant(amplitude);
  std::vector<cplx> c(2 * static_cast<std::size_t>(k) + 1);
  c.front() = c.back() = 0.5 * amplitude;
  return from_coefficients(std::move(c), true);
}

FourierStatistic FourierStatistic::sine(int k, double amplitude) {
  if (k < 0) detail::domain_fail("sine frequency must be non-negative");
  if (k == 0) return constant(0.0);
  std::vector<cplx> c(2 * static_cast<std::size_t>(k) + 1);
  c.front() = cplx(0.0, 0.5 * amplitude);
  c.back() = cplx(0.0, -0.5 * amplitude);
  return from_coefficients(std::move(c), true);
}

FourierStatistic FourierStatistic::read_file(const std::filesystem::path& path,
                                             bool require_real) {
  std::ifstream in(path);
  if (!in) detail::domain_fail("cannot open Fourier coefficient file " + path.string());
  std::map<int, cplx> entries;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    long k;
    double re, im;
    if (!(fields >> k)) continue;
    std::string rest;
    if (!(fields >> re >> im) || (fields >> rest)) {
      detail::domain_fail(path.string() + ":" + std::to_string(line_no) +
                          ": expected 'k re im'");
    }
    if (std::labs(k) > kMaxBand) {
      detail::domain_fail(path.string() + ":" + std::to_string(line_no) + ": |k| exceeds " +
                          std::to_string(kMaxBand));
    }
    if (!entries.emplace(static_cast<int>(k), cplx(re, im)).second) {
      detail::domain_fail(path.string() + ":" + std::to_string(line_no) + ": duplicate k = " +
                          std::to_string(k));
    }
  }
  int band = 0;
  for (const auto& [k, v] : entries) band = std::max(band, std::abs(k));
  std::vector<cplx> coeffs(2 * static_cast<std::size_t>(band) + 1);
  for (const auto& [k, v] : entries) coeffs[static_cast<std::size_t>(k + band)] = v;
  return from_coefficients(std::move(coeffs), require_real);
}

cplx FourierStatistic::coefficient(int k) const {
  if (std::abs(k) > band_) return {};
  return coeffs_[static_cast<std::size_t>(k + band_)];
}

cplx FourierStatistic::operator()(double theta) const {
  cplx acc{};
  for (int k = -band_; k <= band_; ++k) acc += coefficient(k) * std::polar(1.0, k * theta);
  return acc;
}

FourierStatistic FourierStatistic::conjugate() const {
  std::vector<cplx> c(coeffs_.size());
  for (int k = -band_; k <= band_; ++k) {
    c[static_cast<std::size_t>(k + band_)] = std::conj(coefficient(-k));
  }
  return from_coefficients(std::move(c), false);
}

ArcWindow ArcWindow::symmetric(double length) { return centered(0.0, length); }

ArcWindow ArcWindow::centered(double center, double length) {
  ArcWindow arc{center - 0.5 * length, center + 0.5 * length};
  validate(arc);
  return arc;
}

cplx ArcWindow::indicator_coefficient(long k) const {
  if (k == 0) return length() / kTwoPi;
  const double dk = static_cast<double>(k);
  return (std::polar(1.0, -dk * alpha) - std::polar(1.0, -dk * beta)) / cplx(0.0, kTwoPi * dk);
}

void validate(const ArcWindow& arc) {
  if (!(arc.alpha >= -kPi - kArcSlack) || !(arc.beta <= kPi + kArcSlack) ||
      !(arc.alpha < arc.beta)) {
    detail::domain_fail("arc must satisfy -pi <= alpha < beta <= pi");
  }
}

ConvolvedStatistic ConvolvedStatistic::from_pair(const FourierStatistic& f,
                                                 const FourierStatistic& g) {
  ConvolvedStatistic phi;
  const int band = std::min(f.band(), g.band());
  phi.band_ = band;
  phi.coeffs_.resize(2 * static_cast<std::size_t>(band) + 1);
  ComplexSum at_zero;
  for (int k = -band; k <= band; ++k) {
    const cplx c = f.coefficient(k) * g.coefficient(-k);
    phi.coeffs_[static_cast<std::size_t>(k + band)] = c;
    at_zero.add(c);
  }
  phi.at_zero_ = at_zero.value();
  phi.real_ = f.real_valued() && g.real_valued();
  return phi;
}

ConvolvedStatistic ConvolvedStatistic::from_arcs(const ArcWindow& a1, const ArcWindow& a2) {
  validate(a1);
  validate(a2);
  ConvolvedStatistic phi;
  phi.arcs_ = true;
  phi.arc1_ = a1;
  phi.arc2_ = a2;
  phi.at_zero_ = circle_overlap(a1, a2) / kTwoPi;
  phi.real_ = true;
  return phi;
}

ConvolvedStatistic ConvolvedStatistic::tent(double length) {
  const ArcWindow arc = ArcWindow::symmetric(length);
  return from_arcs(arc, arc);
}

cplx ConvolvedStatistic::coefficient(long k) const {
  if (arcs_) {
    if (arc1_ == arc2_) return std::norm(arc1_.indicator_coefficient(k));
    return arc1_.indicator_coefficient(k) * std::conj(arc2_.indicator_coefficient(k));
  }
  if (std::labs(k) > *band_) return {};
  return coeffs_[static_cast<std::size_t>(k + *band_)];
}

double diagonal_weight(int n, long d) {
  check_n(n);
  d = std::labs(d);
  if (d >= n) return 0.0;
  if (d == 0) return n;
  const long last = n - 1 - d;
  if (log_diagonal_term(last, d) < kLogUnderflow) return 0.0;
  // The terms increase with ℓ; find the first one above the underflow cut.
  long lo = 0, hi = last;
  while (lo < hi) {
    const long mid = lo + (hi - lo) / 2;
    if (log_diagonal_term(mid, d) >= kLogUnderflow) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  const double half_d = 0.5 * static_cast<double>(d);
  CompensatedSum acc;
  double t = 0.0;
  for (long ell = lo; ell <= last; ++ell) {
    if ((ell - lo) % kReanchor == 0) {
      t = std::exp(log_diagonal_term(ell, d));
    } else {
      // T(ℓ)/T(ℓ−1) = (ℓ + d/2)² / ((ℓ + d) ℓ)
      const double x = static_cast<double>(ell) + half_d;
      t *= x * x / ((static_cast<double>(ell) + static_cast<double>(d)) * static_cast<double>(ell));
    }
    acc.add(t);
  }
  return acc.value();
}

cplx angular_cov_exact(const ConvolvedStatistic& phi, int n) {
  check_n(n);
  long dmax = n - 1;
  if (phi.band()) dmax = std::min(dmax, *phi.band());
  std::vector<double> weights(static_cast<std::size_t>(dmax) + 1);
  weights[0] = n;
  parallel_for(static_cast<std::size_t>(dmax), [&](std::size_t i) {
    weights[i + 1] = diagonal_weight(n, static_cast<long>(i) + 1);
  });
  ComplexSum acc;
  acc.add(static_cast<double>(n) * phi.at_zero());
  acc.add(-static_cast<double>(n) * phi.coefficient(0));
  for (long d = 1; d <= dmax; ++d) {
    acc.add(-(phi.coefficient(d) + phi.coefficient(-d)) * weights[static_cast<std::size_t>(d)]);
  }
  const cplx out = acc.value();
  if (!std::isfinite(out.real()) || !std::isfinite(out.imag())) {
    detail::numerical_fail("angular covariance is not finite");
  }
  return phi.real_valued() ? cplx(out.real(), 0.0) : out;
}

cplx angular_cov_exact(const FourierStatistic& f, const FourierStatistic& g, int n) {
  return angular_cov_exact(ConvolvedStatistic::from_pair(f, g), n);
}

double angular_var(const FourierStatistic& f, int n) {
  return angular_cov_exact(f, f.conjugate(), n).real();
}

KernelWeights kernel_c_weights(int ell) {
  if (ell < 0) detail::domain_fail("kernel index must be non-negative");
  if (ell == 0) return {1.0, 0.5 * kPi};
  const double l = ell;
  // ln a = ½ ln(πℓ) + 2R(ℓ) − R(2ℓ) and
  // ln(b/a) = ln 2 + 2[ln Γ(ℓ+3/2) − ln Γ(ℓ+1)] − ln(2ℓ+1), both from
  // Stirling's formula with the remainders kept.
  const double log_a =
      0.5 * std::log(kPi * l) + 2.0 * specfun::stirling_remainder(l) - specfun::stirling_remainder(2.0 * l);
  const double log_gamma_gap = (l + 0.5) * std::log1p(0.5 / l) + 0.5 * std::log(l + 0.5) - 0.5 +
                               specfun::stirling_remainder(l + 0.5) -
                               specfun::stirling_remainder(l);
  const double log_ratio = std::numbers::ln2 + 2.0 * log_gamma_gap - std::log(2.0 * l + 1.0);
  const double a = std::exp(log_a);
  return {a, a * std::exp(log_ratio)};
}

double kernel_c_eval(int ell, double theta) {
  const KernelWeights w = kernel_c_weights(ell);
  const double c = std::cos(theta);
  if (ell == 0) return w.a + w.b * c;
  if (c == 0.0) return 0.0;
  const double even = std::exp(std::log(w.a) + 2.0 * ell * std::log(std::abs(c)));
  return even * (1.0 + (w.b / w.a) * c);
}

double kernel_c_fourier(int ell, long k) {
  if (ell < 0) detail::domain_fail("kernel index must be non-negative");
  k = std::labs(k);
  if (k > 2L * ell + 1) return 0.0;
  const double x = ell + ((k % 2 == 1) ? 0.5 : 0.0);
  return std::exp(specfun::log_central_gamma_ratio(x, 0.5 * static_cast<double>(k)));
}

namespace {

// Σ_{lo ≤ |k| ≤ hi} Ĉ_ℓ(k) φ̂(k), with the band of φ applied.
cplx kernel_partial(int ell, const ConvolvedStatistic& phi, long lo, long hi) {
  if (phi.band()) hi = std::min(hi, *phi.band());
  ComplexSum acc;
  for (long k = lo; k <= hi; ++k) {
    const double c = kernel_c_fourier(ell, k);
    acc.add(k == 0 ? c * phi.coefficient(0) : c * (phi.coefficient(k) + phi.coefficient(-k)));
  }
  return acc.value();
}

}  // namespace

cplx kernel_c_apply(int ell, const ConvolvedStatistic& phi) {
  if (ell < 0) detail::domain_fail("kernel index must be non-negative");
  return kernel_partial(ell, phi, 0, 2L * ell + 1);
}

Decomposition angular_cov_decomposed(const ConvolvedStatistic& phi, int n) {
  check_n(n);
  std::vector<cplx> smoothed(static_cast<std::size_t>(n));
  std::vector<cplx> restored(static_cast<std::size_t>(n));
  parallel_for(smoothed.size(), [&](std::size_t i) {
    const int ell = static_cast<int>(i);
    smoothed[i] = kernel_c_apply(ell, phi);
    // Pairs (a, b) with a + b ∈ {2ℓ, 2ℓ+1} and max(a, b) ≥ N have
    // |a − b| ≥ 2N − 2ℓ − 1; they exist only from ℓ = ⌊N/2⌋ on.
    if (ell >= n / 2) restored[i] = kernel_partial(ell, phi, 2L * n - 2L * ell - 1, 2L * ell + 1);
  });
  ComplexSum main, correction;
  main.add(static_cast<double>(n) * phi.at_zero());
  for (std::size_t i = 0; i < smoothed.size(); ++i) {
    main.add(-smoothed[i]);
    correction.add(restored[i]);
  }
  Decomposition out{main.value(), correction.value()};
  if (phi.real_valued()) {
    out.main = out.main.real();
    out.correction = out.correction.real();
  }
  return out;
}

Decomposition angular_cov_decomposed(const FourierStatistic& f, const FourierStatistic& g,
                                     int n) {
  return angular_cov_decomposed(ConvolvedStatistic::from_pair(f, g), n);
}

double angular_count_mean(int n, const ArcWindow& arc) {
  check_n(n);
  validate(arc);
  return n * arc.length() / kTwoPi;
}

double angular_count_var(int n, const ArcWindow& arc) {
  return angular_cov_exact(ConvolvedStatistic::from_arcs(arc, arc), n).real();
}

double angular_count_cov(int n, const ArcWindow& arc1, const ArcWindow& arc2) {
  if (arc1 == arc2) return angular_count_var(n, arc1);
  return angular_cov_exact(ConvolvedStatistic::from_arcs(arc1, arc2), n).real();
}

}  // namespace ginibre::angular
