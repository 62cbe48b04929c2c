#include "ginibre/dpp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ginibre/error.hpp"
#include "ginibre/parallel.hpp"
#include "ginibre/specfun.hpp"

namespace ginibre::dpp {

namespace {

using Matrix = std::vector<cplx>;

std::size_t at(int n, int i, int j) {
  return static_cast<std::size_t>(i) * static_cast<std::size_t>(n) + static_cast<std::size_t>(j);
}

// Product of two Hermitian matrices known to commute, symmetrised so the
// result is exactly Hermitian.
Matrix multiply(int n, const Matrix& a, const Matrix& b) {
  Matrix out(a.size());
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t row) {
    const int i = static_cast<int>(row);
    for (int k = 0; k < n; ++k) {
      const cplx aik = a[at(n, i, k)];
      if (aik == cplx{}) continue;
      for (int j = 0; j < n; ++j) out[at(n, i, j)] += aik * b[at(n, k, j)];
    }
  });
  for (int i = 0; i < n; ++i) {
    out[at(n, i, i)] = out[at(n, i, i)].real();
    for (int j = i + 1; j < n; ++j) {
      const cplx avg = 0.5 * (out[at(n, i, j)] + std::conj(out[at(n, j, i)]));
      out[at(n, i, j)] = avg;
      out[at(n, j, i)] = std::conj(avg);
    }
  }
  return out;
}

double trace(int n, const Matrix& a) {
  CompensatedSum s;
  for (int i = 0; i < n; ++i) s.add(a[at(n, i, i)].real());
  return s.value();
}

// Tr(AB) for Hermitian B: Σ_ij A_ij conj(B_ij).
double trace_product(int n, const Matrix& a, const Matrix& b) {
  CompensatedSum s;
  for (std::size_t i = 0; i < static_cast<std::size_t>(n) * n; ++i) {
    s.add((a[i] * std::conj(b[i])).real());
  }
  return s.value();
}

void check_order(int n_max) {
  if (n_max < 1 || n_max > kMaxCumulantOrder) {
    detail::domain_fail("cumulants: order must lie in 1.." + std::to_string(kMaxCumulantOrder));
  }
}

double factorial(int k) {
  double f = 1.0;
  for (int j = 2; j <= k; ++j) f *= j;
  return f;
}

void fill_cluster(CumulantSet& cs) {
  cs.cluster.resize(cs.traces.size());
  for (std::size_t i = 0; i < cs.traces.size(); ++i) {
    const double sign = (i % 2 == 0) ? 1.0 : -1.0;
    cs.cluster[i] = sign * factorial(static_cast<int>(i)) * cs.traces[i];
  }
}

double horner(const std::vector<double>& c, double t) {
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * t + *it;
  return acc;
}

// Scalar path shared by diagonal operators and independent indicators so
// both produce identical bits.
CumulantSet scalar_cumulants(const std::vector<double>& p, int n_max) {
  check_order(n_max);
  CumulantSet cs;
  cs.order = n_max;
  cs.traces.assign(static_cast<std::size_t>(n_max), 0.0);
  cs.cumulants.assign(static_cast<std::size_t>(n_max), 0.0);
  std::vector<std::vector<double>> poly;
  poly.emplace_back();
  for (int k = 2; k <= n_max; ++k) poly.push_back(bernoulli_cumulant_coefficients(k));
  for (int k = 1; k <= n_max; ++k) {
    CompensatedSum tr, cum;
    for (double x : p) {
      tr.add(std::pow(x, k));
      if (k == 1) {
        cum.add(x);
        continue;
      }
      const double t = x * (1.0 - x);
      double v = horner(poly[static_cast<std::size_t>(k - 1)], t);
      if (k % 2 == 1) v *= 1.0 - 2.0 * x;
      cum.add(v);
    }
    cs.traces[static_cast<std::size_t>(k - 1)] = tr.value();
    cs.cumulants[static_cast<std::size_t>(k - 1)] = cum.value();
  }
  fill_cluster(cs);
  return cs;
}

}  // namespace

std::string_view to_string(Structure s) {
  switch (s) {
    case Structure::diagonal:
      return "diagonal";
    case Structure::sector:
      return "sector";
    case Structure::dense:
      return "dense";
  }
  return "unknown";
}

GramOperator GramOperator::diagonal(std::vector<double> entries) {
  if (entries.empty()) detail::domain_fail("GramOperator: empty");
  for (double d : entries) {
    if (!std::isfinite(d)) detail::domain_fail("GramOperator: non-finite entry");
  }
  GramOperator g;
  g.n_ = static_cast<int>(entries.size());
  g.structure_ = Structure::diagonal;
  g.diag_ = std::move(entries);
  return g;
}

GramOperator GramOperator::dense(int n, std::vector<cplx> entries, Structure tag) {
  if (n < 1 || entries.size() != static_cast<std::size_t>(n) * n) {
    detail::domain_fail("GramOperator: need n*n entries");
  }
  double scale = 0.0;
  for (const cplx& z : entries) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      detail::domain_fail("GramOperator: non-finite entry");
    }
    scale = std::max(scale, std::abs(z));
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      if (std::abs(entries[at(n, i, j)] - std::conj(entries[at(n, j, i)])) > 1e-12 * scale) {
        detail::domain_fail("GramOperator: matrix is not Hermitian");
      }
    }
  }
  GramOperator g;
  g.n_ = n;
  g.structure_ = tag == Structure::diagonal ? Structure::dense : tag;
  g.entries_ = std::move(entries);
  return g;
}

cplx GramOperator::operator()(int row, int col) const {
  if (row < 0 || col < 0 || row >= n_ || col >= n_) detail::domain_fail("GramOperator: index");
  if (structure_ == Structure::diagonal) {
    return row == col ? cplx{diag_[static_cast<std::size_t>(row)]} : cplx{};
  }
  return entries_[at(n_, row, col)];
}

std::vector<double> GramOperator::diagonal_entries() const {
  if (structure_ == Structure::diagonal) return diag_;
  std::vector<double> out(static_cast<std::size_t>(n_));
  for (int i = 0; i < n_; ++i) out[static_cast<std::size_t>(i)] = entries_[at(n_, i, i)].real();
  return out;
}

double GramOperator::trace() const {
  CompensatedSum s;
  for (double d : diagonal_entries()) s.add(d);
  return s.value();
}

std::pair<double, double> GramOperator::gershgorin() const {
  double lo = specfun::kInf, hi = -specfun::kInf;
  for (int i = 0; i < n_; ++i) {
    double radius = 0.0;
    if (structure_ != Structure::diagonal) {
      for (int j = 0; j < n_; ++j) {
        if (j != i) radius += std::abs(entries_[at(n_, i, j)]);
      }
    }
    const double centre = (*this)(i, i).real();
    lo = std::min(lo, centre - radius);
    hi = std::max(hi, centre + radius);
  }
  return {lo, hi};
}

GramOperator gram_annulus(int n, const radial::ModulusInterval& w) {
  return GramOperator::diagonal(radial::count_probabilities(n, w, Ensemble::complex));
}

GramOperator gram_annulus(int n, double a, double b) {
  return gram_annulus(n, radial::ModulusInterval{a, b});
}

GramOperator gram_sector(int n, const angular::ArcWindow& arc) {
  if (n < 1) detail::domain_fail("gram_sector: need N >= 1");
  angular::validate(arc);
  std::vector<cplx> w(static_cast<std::size_t>(2 * n - 1));
  for (long d = -(n - 1); d <= n - 1; ++d) {
    w[static_cast<std::size_t>(d + n - 1)] = arc.indicator_coefficient(d);
  }
  std::vector<cplx> entries(static_cast<std::size_t>(n) * n);
  for (int l = 0; l < n; ++l) {
    for (int m = l; m < n; ++m) {
      const double radial =
          std::exp(0.5 * specfun::log_central_gamma_ratio(0.5 * (l + m), 0.5 * (m - l)));
      const cplx value = radial * w[static_cast<std::size_t>(m - l + n - 1)];
      entries[at(n, l, m)] = value;
      entries[at(n, m, l)] = std::conj(value);
    }
    entries[at(n, l, l)] = entries[at(n, l, l)].real();
  }
  return GramOperator::dense(n, std::move(entries), Structure::sector);
}

std::vector<double> bernoulli_cumulant_coefficients(int n) {
  if (n < 2) detail::domain_fail("bernoulli_cumulant_coefficients: need n >= 2");
  // κ_{n+1} = t dκ_n/dp with dt/dp = u and du/dp = −2, u² = 1 − 4t:
  //   t^j     → j t^j u
  //   t^j u   → j t^j − (4j + 2) t^{j+1}
  std::vector<double> c{0.0, 1.0};
  bool odd = false;
  for (int k = 2; k < n; ++k) {
    std::vector<double> next(c.size() + 1, 0.0);
    for (std::size_t j = 0; j < c.size(); ++j) {
      const double jj = static_cast<double>(j);
      if (odd) {
        next[j] += jj * c[j];
        next[j + 1] -= (4.0 * jj + 2.0) * c[j];
      } else {
        next[j] += jj * c[j];
      }
    }
    while (next.size() > 1 && next.back() == 0.0) next.pop_back();
    c = std::move(next);
    odd = !odd;
  }
  return c;
}

CumulantSet cumulants_from_gram(const GramOperator& g, int n_max) {
  check_order(n_max);
  if (g.structure() == Structure::diagonal) return scalar_cumulants(g.diagonal_entries(), n_max);

  const int n = g.dimension();
  const Matrix& a = g.entries();
  const int half = (n_max + 1) / 2;

  // G^1..G^half, then Tr(G^k) = Tr(G^⌈k/2⌉ G^⌊k/2⌋).
  std::vector<Matrix> pow{a};
  for (int k = 2; k <= std::max(half, 2); ++k) pow.push_back(multiply(n, pow.back(), a));
  CumulantSet cs;
  cs.order = n_max;
  cs.traces.resize(static_cast<std::size_t>(n_max));
  for (int k = 1; k <= n_max; ++k) {
    const int hi = (k + 1) / 2, lo = k / 2;
    cs.traces[static_cast<std::size_t>(k - 1)] =
        lo == 0 ? trace(n, a)
                : trace_product(n, pow[static_cast<std::size_t>(hi - 1)],
                                pow[static_cast<std::size_t>(lo - 1)]);
  }
  fill_cluster(cs);

  // T = G − G², powers T^1..T^{n_max/2}.
  Matrix t(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) t[i] = a[i] - pow[1][i];
  std::vector<Matrix> tpow{t};
  for (int j = 2; j <= n_max / 2; ++j) tpow.push_back(multiply(n, tpow.back(), t));
  std::vector<double> tr_t(tpow.size()), tr_tu(tpow.size());
  for (std::size_t j = 0; j < tpow.size(); ++j) {
    tr_t[j] = trace(n, tpow[j]);
    tr_tu[j] = tr_t[j] - 2.0 * trace_product(n, tpow[j], a);
  }

  cs.cumulants.assign(static_cast<std::size_t>(n_max), 0.0);
  cs.cumulants[0] = cs.traces[0];
  for (int k = 2; k <= n_max; ++k) {
    const auto c = bernoulli_cumulant_coefficients(k);
    const auto& base = (k % 2 == 1) ? tr_tu : tr_t;
    CompensatedSum s;
    for (std::size_t j = 1; j < c.size(); ++j) s.add(c[j] * base[j - 1]);
    cs.cumulants[static_cast<std::size_t>(k - 1)] = s.value();
  }
  return cs;
}

CumulantSet cumulants_permanental(const std::vector<double>& p, int n_max) {
  if (p.empty()) detail::domain_fail("cumulants_permanental: empty probability sequence");
  for (double x : p) {
    if (!(x >= 0.0 && x <= 1.0)) detail::domain_fail("cumulants_permanental: p outside [0, 1]");
  }
  return scalar_cumulants(p, n_max);
}

CltCertificate clt_certificate(const CumulantSet& cs, double tolerance) {
  if (cs.order < 2) detail::domain_fail("clt_certificate: need cumulants up to order 2");
  const double c2 = cs.c(2);
  if (!(c2 > 1e-12 * std::max(1.0, std::abs(cs.c(1))))) {
    detail::domain_fail("clt_certificate: variance is zero (deterministic count)");
  }
  CltCertificate out;
  out.variance = c2;
  out.tolerance = tolerance;
  out.clt_consistent = true;
  for (int n = 3; n <= cs.order; ++n) {
    const double z = cs.c(n) / std::pow(c2, 0.5 * n);
    out.normalized.push_back(z);
    if (!(std::abs(z) <= tolerance)) out.clt_consistent = false;
    double bound = 0.0;
    for (int k = 2; k <= n; ++k) {
      bound += static_cast<double>(specfun::stirling2(n, k)) * factorial(k - 1) * (k - 1);
    }
    out.bound_witness = std::max(out.bound_witness, std::abs(cs.c(n)) / (bound * c2));
  }
  return out;
}

}  // namespace ginibre::dpp
