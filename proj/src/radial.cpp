#include "ginibre/radial.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "ginibre/error.hpp"
#include "ginibre/parallel.hpp"
#include "ginibre/quadrature.hpp"
#include "ginibre/specfun.hpp"

namespace ginibre::radial {

namespace {

constexpr std::size_t kPanelNodes = 256;
// Half-width of the quadrature window in t = √s, where the density of t is
// close to a Gaussian of variance ½; 12 units leave mass far below 1e−40.
constexpr double kWindowHalfWidth = 12.0;
constexpr double kDomainTailTolerance = 1e-14;

void check_n(int n) {
  if (n < 1) detail::domain_fail("N must be at least 1");
}

double log_t_density(double k, double t) {
  if (t <= 0.0) return -specfun::kInf;
  return std::numbers::ln2 + std::log(t) + specfun::gamma_log_pdf(k, t * t);
}

struct WeightedNodes {
  std::vector<double> r;
  std::vector<double> w;

  template <class F>
  double expect(F&& f) const {
    CompensatedSum acc;
    for (std::size_t i = 0; i < r.size(); ++i) acc.add(w[i] * f(r[i]));
    return acc.value();
  }
};

// Nodes for E F(r), r = t / √scale, t² ~ Gamma(shape). `degree` widens the
// window for polynomial weights, whose tilt moves mass towards larger t.
WeightedNodes expectation_nodes(const GammaSumLaw& law, int degree,
                                const std::vector<double>& r_breaks, double r_max) {
  const double k = law.shape;
  const double sqrt_scale = std::sqrt(law.scale);
  double t_lo = std::max(0.0, std::sqrt(std::max(k - 0.5, 0.0)) - kWindowHalfWidth);
  double t_hi = std::sqrt(k + 0.5 * degree + 0.5) + kWindowHalfWidth;
  if (std::isfinite(r_max) && t_hi > r_max * sqrt_scale) {
    const double tail = specfun::regularized_gamma_upper(k, law.scale * r_max * r_max);
    if (tail > kDomainTailTolerance) {
      detail::numerical_fail("callable test function is only defined up to r = " +
                             std::to_string(r_max) + ", but the modulus law with shape " +
                             std::to_string(static_cast<long long>(k)) +
                             " puts mass " + std::to_string(tail) + " beyond it");
    }
    t_hi = r_max * sqrt_scale;
  }
  std::vector<double> cuts{t_lo, t_hi};
  for (double b : r_breaks) {
    const double t = b * sqrt_scale;
    if (t > t_lo && t < t_hi) cuts.push_back(t);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  const quad::QuadratureRule& unit = quad::reference_rule(kPanelNodes);
  WeightedNodes out;
  out.r.reserve(kPanelNodes * (cuts.size() - 1));
  out.w.reserve(kPanelNodes * (cuts.size() - 1));
  CompensatedSum mass;
  for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
    const double half = 0.5 * (cuts[p + 1] - cuts[p]);
    const double mid = 0.5 * (cuts[p + 1] + cuts[p]);
    for (std::size_t i = 0; i < unit.size(); ++i) {
      const double t = mid + half * unit.nodes[i];
      const double w = half * unit.weights[i] * std::exp(log_t_density(k, t));
      out.r.push_back(t / sqrt_scale);
      out.w.push_back(w);
      mass.add(w);
    }
  }
  // Renormalize so constants integrate exactly; the dropped mass is
  // below 1e−14 by construction.
  const double total = mass.value();
  for (double& w : out.w) w /= total;
  return out;
}

int quadrature_degree(const RadialTestFunction& f) {
  return f.kind() == RadialTestFunction::Kind::polynomial ? f.degree() : 0;
}

double indicator_prob(const GammaSumLaw& law, const ModulusInterval& w) {
  return specfun::gamma_interval_prob(law.shape, law.scale * w.lo * w.lo,
                                      law.scale * w.hi * w.hi);
}

// p(1 − p) with the complement taken as the sum of the two outer tails.
double indicator_var(const GammaSumLaw& law, const ModulusInterval& w) {
  if (w.lo == w.hi) return 0.0;
  const double p = indicator_prob(law, w);
  const double below = specfun::regularized_gamma_lower(law.shape, law.scale * w.lo * w.lo);
  const double above = specfun::regularized_gamma_upper(law.shape, law.scale * w.hi * w.hi);
  return p * (below + above);
}

double indicator_cov(const GammaSumLaw& law, const ModulusInterval& w1,
                     const ModulusInterval& w2) {
  if (w1 == w2) return indicator_var(law, w1);
  const double lo = std::max(w1.lo, w2.lo);
  const double hi = std::min(w1.hi, w2.hi);
  const double joint = lo < hi ? indicator_prob(law, {lo, hi}) : 0.0;
  return joint - indicator_prob(law, w1) * indicator_prob(law, w2);
}

double single_mean(const RadialTestFunction& f, const GammaSumLaw& law) {
  if (f.kind() == RadialTestFunction::Kind::indicator) return indicator_prob(law, f.interval());
  const WeightedNodes nodes =
      expectation_nodes(law, quadrature_degree(f), f.breakpoints(), f.domain_max());
  return nodes.expect([&](double r) { return f(r); });
}

double single_cov(const RadialTestFunction& f, const RadialTestFunction& g,
                  const GammaSumLaw& law) {
  using Kind = RadialTestFunction::Kind;
  if (f.kind() == Kind::indicator && g.kind() == Kind::indicator) {
    return indicator_cov(law, f.interval(), g.interval());
  }
  std::vector<double> breaks = f.breakpoints();
  const std::vector<double> gb = g.breakpoints();
  breaks.insert(breaks.end(), gb.begin(), gb.end());
  const WeightedNodes nodes =
      expectation_nodes(law, std::max(quadrature_degree(f), quadrature_degree(g)), breaks,
                        std::min(f.domain_max(), g.domain_max()));
  const double mf = f.kind() == Kind::indicator ? indicator_prob(law, f.interval())
                                                : nodes.expect([&](double r) { return f(r); });
  const double mg = g.kind() == Kind::indicator ? indicator_prob(law, g.interval())
                                                : nodes.expect([&](double r) { return g(r); });
  return nodes.expect([&](double r) { return (f(r) - mf) * (g(r) - mg); });
}

template <class Term>
double sum_over_levels(int n, Term&& term) {
  std::vector<double> terms(static_cast<std::size_t>(n));
  parallel_for(terms.size(), [&](std::size_t i) { terms[i] = term(static_cast<int>(i) + 1); });
  CompensatedSum acc;
  for (double t : terms) acc.add(t);
  return acc.value();
}

double polynomial_value(const std::vector<double>& c, double r) {
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * r + *it;
  return acc;
}

}  // namespace

void validate(const ModulusInterval& w) {
  if (std::isnan(w.lo) || std::isnan(w.hi) || w.lo < 0.0 || w.lo > w.hi || std::isinf(w.lo)) {
    detail::domain_fail("modulus window must satisfy 0 <= a <= b");
  }
}

RadialTestFunction RadialTestFunction::polynomial(std::vector<double> coefficients) {
  while (coefficients.size() > 1 && coefficients.back() == 0.0) coefficients.pop_back();
  if (coefficients.empty()) coefficients.push_back(0.0);
  if (static_cast<int>(coefficients.size()) - 1 > kMaxDegree) {
    detail::domain_fail("polynomial test function degree exceeds " + std::to_string(kMaxDegree));
  }
  for (double c : coefficients) {
    if (!std::isfinite(c)) detail::domain_fail("polynomial coefficients must be finite");
  }
  RadialTestFunction f;
  f.kind_ = Kind::polynomial;
  f.coeffs_ = std::move(coefficients);
  return f;
}

RadialTestFunction RadialTestFunction::constant(double c) { return polynomial({c}); }

RadialTestFunction RadialTestFunction::indicator(double a, double b) {
  return indicator(ModulusInterval{a, b});
}

RadialTestFunction RadialTestFunction::indicator(const ModulusInterval& w) {
  validate(w);
  RadialTestFunction f;
  f.kind_ = Kind::indicator;
  f.window_ = w;
  return f;
}

RadialTestFunction RadialTestFunction::callable(std::function<double(double)> fn, double r_max,
                                                std::vector<double> breakpoints,
                                                std::function<double(double)> derivative) {
  if (!fn) detail::domain_fail("callable test function is empty");
  if (!(r_max >= 2.0)) detail::domain_fail("callable test function needs r_max >= 2");
  RadialTestFunction f;
  f.kind_ = Kind::callable;
  f.fn_ = std::move(fn);
  f.dfn_ = std::move(derivative);
  f.breaks_ = std::move(breakpoints);
  f.r_max_ = r_max;
  return f;
}

double RadialTestFunction::operator()(double r) const {
  switch (kind_) {
    case Kind::polynomial:
      return polynomial_value(coeffs_, r);
    case Kind::indicator:
      return (r >= window_.lo && r <= window_.hi) ? 1.0 : 0.0;
    case Kind::callable:
      break;
  }
  return fn_(r);
}

bool RadialTestFunction::has_derivative() const {
  return kind_ == Kind::polynomial || (kind_ == Kind::callable && static_cast<bool>(dfn_));
}

double RadialTestFunction::derivative(double r) const {
  if (kind_ == Kind::polynomial) {
    double acc = 0.0;
    for (std::size_t j = coeffs_.size(); j-- > 1;) acc = acc * r + static_cast<double>(j) * coeffs_[j];
    return acc;
  }
  if (!has_derivative()) detail::domain_fail("test function has no derivative");
  return dfn_(r);
}

int RadialTestFunction::degree() const {
  return kind_ == Kind::polynomial ? static_cast<int>(coeffs_.size()) - 1 : 0;
}

std::vector<double> RadialTestFunction::breakpoints() const {
  switch (kind_) {
    case Kind::polynomial:
      return {};
    case Kind::indicator: {
      std::vector<double> out{window_.lo};
      if (std::isfinite(window_.hi)) out.push_back(window_.hi);
      return out;
    }
    case Kind::callable:
      break;
  }
  return breaks_;
}

RadialTestFunction combine(double alpha, const RadialTestFunction& f,
                           const RadialTestFunction& g) {
  using Kind = RadialTestFunction::Kind;
  if (f.kind() == Kind::polynomial && g.kind() == Kind::polynomial) {
    std::vector<double> c(std::max(f.coeffs_.size(), g.coeffs_.size()), 0.0);
    for (std::size_t j = 0; j < f.coeffs_.size(); ++j) c[j] += alpha * f.coeffs_[j];
    for (std::size_t j = 0; j < g.coeffs_.size(); ++j) c[j] += g.coeffs_[j];
    return RadialTestFunction::polynomial(std::move(c));
  }
  std::vector<double> breaks = f.breakpoints();
  const std::vector<double> gb = g.breakpoints();
  breaks.insert(breaks.end(), gb.begin(), gb.end());
  const double r_max = std::max(2.0, std::min(f.domain_max(), g.domain_max()));
  std::function<double(double)> deriv;
  if (f.has_derivative() && g.has_derivative()) {
    deriv = [alpha, f, g](double r) { return alpha * f.derivative(r) + g.derivative(r); };
  }
  RadialTestFunction out = RadialTestFunction::callable(
      [alpha, f, g](double r) { return alpha * f(r) + g(r); }, r_max, std::move(breaks),
      std::move(deriv));
  out.r_max_ = std::min(f.domain_max(), g.domain_max());
  return out;
}

double radial_mean_exact(const RadialTestFunction& f, int n, Ensemble ens) {
  check_n(n);
  return sum_over_levels(n, [&](int ell) { return single_mean(f, modulus_law(ens, n, ell)); });
}

double radial_cov_exact(const RadialTestFunction& f, const RadialTestFunction& g, int n,
                        Ensemble ens) {
  check_n(n);
  return sum_over_levels(n, [&](int ell) { return single_cov(f, g, modulus_law(ens, n, ell)); });
}

std::vector<double> count_probabilities(int n, const ModulusInterval& w, Ensemble ens) {
  check_n(n);
  validate(w);
  std::vector<double> p(static_cast<std::size_t>(n));
  for (int ell = 1; ell <= n; ++ell) {
    p[static_cast<std::size_t>(ell - 1)] = indicator_prob(modulus_law(ens, n, ell), w);
  }
  return p;
}

double radial_count_mean(int n, double a, double b, Ensemble ens) {
  check_n(n);
  const ModulusInterval w{a, b};
  validate(w);
  return sum_over_levels(n, [&](int ell) { return indicator_prob(modulus_law(ens, n, ell), w); });
}

double radial_count_var(int n, double a, double b, Ensemble ens) {
  check_n(n);
  const ModulusInterval w{a, b};
  validate(w);
  return sum_over_levels(n, [&](int ell) { return indicator_var(modulus_law(ens, n, ell), w); });
}

double radial_count_cov(int n, const ModulusInterval& w1, const ModulusInterval& w2,
                        Ensemble ens) {
  check_n(n);
  validate(w1);
  validate(w2);
  if (w1 == w2) return radial_count_var(n, w1.lo, w1.hi, ens);
  return sum_over_levels(
      n, [&](int ell) { return indicator_cov(modulus_law(ens, n, ell), w1, w2); });
}

namespace {

// First k whose factor E exp(λ h) diverges, or 0 if all are finite. Only
// polynomials can diverge; the growth of λ c_d r^d against e^{−N r²} decides.
int first_divergent_level(const RadialTestFunction& h, double lambda, int n) {
  if (h.kind() != RadialTestFunction::Kind::polynomial || lambda == 0.0) return 0;
  const int d = h.degree();
  const double lead = lambda * h.coefficients().back();
  if (d > 2 && lead > 0.0) return 1;
  if (d == 2 && lead >= static_cast<double>(n)) return 1;
  return 0;
}

double level_log_mgf(const RadialTestFunction& h, double lambda, double k, double n) {
  const double sqrt_n = std::sqrt(n);
  const double t_cap = std::isfinite(h.domain_max()) ? h.domain_max() * sqrt_n : specfun::kInf;
  auto log_integrand = [&](double t) { return lambda * h(t / sqrt_n) + log_t_density(k, t); };

  // Scan outwards from the untilted mode until the log-integrand has fallen
  // 80 units below the running maximum on both sides.
  constexpr double kStep = 0.25;
  constexpr double kDrop = 80.0;
  const double t0 = std::min(std::max(std::sqrt(std::max(k - 0.5, 0.0)), kStep), t_cap);
  double best = log_integrand(t0);
  double t_hi = t0;
  for (int steps = 0;; ++steps) {
    if (t_hi >= t_cap) {
      if (specfun::regularized_gamma_upper(k, t_cap * t_cap) <= kDomainTailTolerance) break;
      detail::numerical_fail("log-MGF factor for k = " +
                             std::to_string(static_cast<long long>(k)) +
                             " needs the test function beyond its domain");
    }
    if (steps > 4'000'000) {
      detail::numerical_fail("log-MGF factor for k = " +
                             std::to_string(static_cast<long long>(k)) + " does not converge");
    }
    t_hi = std::min(t_hi + kStep, t_cap);
    const double v = log_integrand(t_hi);
    best = std::max(best, v);
    if (v < best - kDrop) break;
  }
  double t_lo = t0;
  while (t_lo > 0.0) {
    t_lo = std::max(t_lo - kStep, 0.0);
    const double v = log_integrand(t_lo);
    best = std::max(best, v);
    if (v < best - kDrop) break;
  }

  std::vector<double> cuts{t_lo, t_hi};
  for (double b : h.breakpoints()) {
    const double t = b * sqrt_n;
    if (t > t_lo && t < t_hi) cuts.push_back(t);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  CompensatedSum acc;
  for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
    const double width = cuts[p + 1] - cuts[p];
    const auto nodes = std::clamp<std::size_t>(static_cast<std::size_t>(width / 0.05),
                                               kPanelNodes, 4096);
    const quad::QuadratureRule rule = quad::legendre_rule(nodes, cuts[p], cuts[p + 1]);
    for (std::size_t i = 0; i < rule.size(); ++i) {
      acc.add(rule.weights[i] * std::exp(log_integrand(rule.nodes[i]) - best));
    }
  }
  return best + std::log(acc.value());
}

}  // namespace

double radial_log_mgf(const RadialTestFunction& h, double lambda, int n) {
  check_n(n);
  if (!std::isfinite(lambda)) detail::domain_fail("log-MGF parameter must be finite");
  if (lambda == 0.0) return 0.0;
  if (const int k = first_divergent_level(h, lambda, n); k > 0) {
    detail::numerical_fail("log-MGF factor for k = " + std::to_string(k) +
                           " diverges: the tilt outgrows the Gaussian weight");
  }
  return sum_over_levels(n, [&](int k) {
    return level_log_mgf(h, lambda, static_cast<double>(k), static_cast<double>(n));
  });
}

}  // namespace ginibre::radial
