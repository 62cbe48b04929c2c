#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "ginibre/error.hpp"
#include "ginibre/mc.hpp"
#include "ginibre/parallel.hpp"
#include "ginibre/radial.hpp"

using namespace ginibre;
using namespace ginibre::mc;

namespace {

using lcplx = std::complex<long double>;

// Characteristic polynomial by Faddeev–LeVerrier in extended precision,
// roots by Durand–Kerner, then Newton polishing.
std::vector<cplx> durand_kerner_eigenvalues(const std::vector<cplx>& a, int n) {
  std::vector<lcplx> m(static_cast<std::size_t>(n * n), 0.0L), am(m.size());
  std::vector<lcplx> coeff(static_cast<std::size_t>(n + 1));
  coeff[static_cast<std::size_t>(n)] = 1.0L;
  auto A = [&](int i, int j) { return lcplx(a[static_cast<std::size_t>(i * n + j)]); };
  for (int k = 1; k <= n; ++k) {
    for (int i = 0; i < n; ++i) m[static_cast<std::size_t>(i * n + i)] += coeff[static_cast<std::size_t>(n - k + 1)];
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        lcplx s = 0.0L;
        for (int l = 0; l < n; ++l) s += A(i, l) * m[static_cast<std::size_t>(l * n + j)];
        am[static_cast<std::size_t>(i * n + j)] = s;
      }
    }
    lcplx tr = 0.0L;
    for (int i = 0; i < n; ++i) tr += am[static_cast<std::size_t>(i * n + i)];
    coeff[static_cast<std::size_t>(n - k)] = -tr / static_cast<long double>(k);
    m = am;
  }
  auto poly = [&](lcplx z) {
    lcplx acc = 0.0L;
    for (int k = n; k >= 0; --k) acc = acc * z + coeff[static_cast<std::size_t>(k)];
    return acc;
  };
  std::vector<lcplx> roots(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) roots[static_cast<std::size_t>(k)] = std::pow(lcplx(0.4L, 0.9L), k);
  for (int iter = 0; iter < 2000; ++iter) {
    for (int k = 0; k < n; ++k) {
      lcplx denom = 1.0L;
      for (int j = 0; j < n; ++j) {
        if (j != k) denom *= roots[static_cast<std::size_t>(k)] - roots[static_cast<std::size_t>(j)];
      }
      roots[static_cast<std::size_t>(k)] -= poly(roots[static_cast<std::size_t>(k)]) / denom;
    }
  }
  std::vector<cplx> out;
  for (const lcplx& z : roots) out.emplace_back(static_cast<double>(z.real()), static_cast<double>(z.imag()));
  return out;
}

// Largest distance after greedy nearest matching.
double match_distance(std::vector<cplx> got, std::vector<cplx> want) {
  double worst = 0.0;
  for (const cplx& w : want) {
    auto it = std::min_element(got.begin(), got.end(), [&](cplx x, cplx y) {
      return std::abs(x - w) < std::abs(y - w);
    });
    worst = std::max(worst, std::abs(*it - w));
    got.erase(it);
  }
  return worst;
}

double frobenius(const std::vector<cplx>& a) {
  double s = 0.0;
  for (const cplx& z : a) s += std::norm(z);
  return std::sqrt(s);
}

std::vector<cplx> square(const std::vector<cplx>& a, int n) {
  std::vector<cplx> out(a.size());
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j) out[static_cast<std::size_t>(i * n + j)] += a[static_cast<std::size_t>(i * n + k)] * a[static_cast<std::size_t>(k * n + j)];
  return out;
}

void check_trace_contract(const std::vector<cplx>& a, int n) {
  const auto ev = eig_dense(a, n);
  REQUIRE(ev.size() == static_cast<std::size_t>(n));
  cplx tr = 0.0, s = 0.0, tr2 = 0.0, s2 = 0.0;
  const auto a2 = square(a, n);
  for (int i = 0; i < n; ++i) {
    tr += a[static_cast<std::size_t>(i * n + i)];
    tr2 += a2[static_cast<std::size_t>(i * n + i)];
  }
  for (const cplx& z : ev) {
    s += z;
    s2 += z * z;
  }
  CHECK(std::abs(s - tr) <= 1e-10 * frobenius(a) * n);
  CHECK(std::abs(s2 - tr2) <= 1e-8 * frobenius(a2) * n);
}

}  // namespace

TEST_CASE("philox known answers") {
  using A4 = std::array<std::uint32_t, 4>;
  CHECK(RngStream::philox({0, 0, 0, 0}, {0, 0}) == A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(RngStream::philox({~0u, ~0u, ~0u, ~0u}, {~0u, ~0u}) ==
        A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(RngStream::philox({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are reproducible and distinct") {
  RngStream a(42, 3), b(42, 3), c(42, 4), d(43, 3);
  bool differ_c = false, differ_d = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    differ_c |= x != c.next_u64();
    differ_d |= x != d.next_u64();
  }
  CHECK(differ_c);
  CHECK(differ_d);
}

TEST_CASE("variate moments") {
  RngStream rng(5, 0);
  constexpr int kDraws = 200000;
  double su = 0, sn = 0, sn2 = 0, sn4 = 0, umin = 1, umax = 0;
  for (int i = 0; i < kDraws; ++i) {
    const double u = rng.uniform();
    umin = std::min(umin, u);
    umax = std::max(umax, u);
    su += u;
    const double z = rng.normal();
    sn += z;
    sn2 += z * z;
    sn4 += z * z * z * z;
  }
  CHECK(umin > 0.0);
  CHECK(umax < 1.0);
  CHECK(std::abs(su / kDraws - 0.5) < 5 * std::sqrt(1.0 / 12 / kDraws));
  CHECK(std::abs(sn / kDraws) < 5 / std::sqrt(double(kDraws)));
  CHECK(std::abs(sn2 / kDraws - 1.0) < 5 * std::sqrt(2.0 / kDraws));
  CHECK(std::abs(sn4 / kDraws - 3.0) < 5 * std::sqrt(96.0 / kDraws));
  for (double shape : {0.3, 1.0, 3.7, 250.0}) {
    CAPTURE(shape);
    double s = 0, s2 = 0;
    for (int i = 0; i < kDraws; ++i) {
      const double g = rng.gamma(shape);
      CHECK(g >= 0.0);
      s += g;
      s2 += g * g;
    }
    const double mean = s / kDraws;
    const double var = s2 / kDraws - mean * mean;
    CHECK(std::abs(mean - shape) < 5 * std::sqrt(shape / kDraws));
    CHECK(std::abs(var / shape - 1.0) < 5 * std::sqrt((2.0 + 6.0 / shape) / kDraws));
  }
  CHECK_THROWS_AS(rng.gamma(0.0), DomainError);
}

TEST_CASE("matrix entries have variance 1/N") {
  RngStream rng(9, 0);
  const int n = 200;
  const auto a = sample_ginibre_matrix(n, rng);
  double s = 0, re2 = 0;
  for (const cplx& z : a) {
    s += std::norm(z);
    re2 += z.real() * z.real();
  }
  const double count = static_cast<double>(a.size());
  CHECK(std::abs(s / count - 1.0 / n) < 5 * (1.0 / n) / std::sqrt(count));
  CHECK(std::abs(re2 / count - 0.5 / n) < 5 * (0.5 / n) * std::sqrt(2.0 / count));
}

TEST_CASE("radial sampler moments") {
  const auto r2 = [](cplx z) { return std::norm(z); };
  SUBCASE("complex mean") {
    const auto batch = run_replicas({50, Ensemble::complex, 100000, 1, {{"r2", r2, true}}});
    const auto m = estimate_mean(batch.column(0));
    CHECK(std::abs(m.mean - 25.5) < 3 * m.se);
  }
  SUBCASE("complex variance") {
    const auto batch = run_replicas({10, Ensemble::complex, 100000, 2, {{"r2", r2, true}}});
    const auto col = batch.column(0);
    const auto v = estimate_cov(col, col);
    CHECK(std::abs(v.cov - 0.55) < 3 * v.se);
  }
  SUBCASE("quaternion mean") {
    const auto batch = run_replicas({50, Ensemble::quaternion, 100000, 3, {{"r2", r2, true}}});
    const auto m = estimate_mean(batch.column(0));
    CHECK(std::abs(m.mean - 25.5) < 3 * m.se);
  }
}

TEST_CASE("dense eigenvalues: small exact cases") {
  CHECK(eig_dense({cplx{0.3, -2.0}}, 1) == std::vector<cplx>{cplx{0.3, -2.0}});
  {
    std::vector<cplx> d(16, 0.0);
    const std::vector<cplx> diag{1.0, cplx{0, 2}, -3.0, 0.5};
    for (int i = 0; i < 4; ++i) d[static_cast<std::size_t>(5 * i)] = diag[static_cast<std::size_t>(i)];
    CHECK(match_distance(eig_dense(d, 4), diag) == 0.0);
  }
  {
    const std::vector<cplx> companion{0, 0, 1, 1, 0, 0, 0, 1, 0};
    std::vector<cplx> roots;
    for (int k = 0; k < 3; ++k) roots.push_back(std::polar(1.0, 2 * std::numbers::pi * k / 3));
    CHECK(match_distance(eig_dense(companion, 3), roots) < 1e-10);
  }
  CHECK(match_distance(eig_dense(std::vector<cplx>(9, 0.0), 3), std::vector<cplx>(3, 0.0)) == 0.0);
  {
    // Upper triangular, already in Schur form.
    std::vector<cplx> t{2.0, 5.0, cplx{1, 1}, 0.0, cplx{0, -1}, 7.0, 0.0, 0.0, -4.0};
    CHECK(match_distance(eig_dense(t, 3), {2.0, cplx{0, -1}, -4.0}) < 1e-14);
  }
  CHECK_THROWS_AS(eig_dense({1.0, 2.0}, 2), DomainError);
  CHECK_THROWS_AS(eig_dense({std::nan("")}, 1), DomainError);
}

TEST_CASE("dense eigenvalues against an independent root finder") {
  RngStream rng(77, 0);
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = sample_ginibre_matrix(8, rng);
    CHECK(match_distance(eig_dense(a, 8), durand_kerner_eigenvalues(a, 8)) < 1e-8);
  }
}

TEST_CASE("dense eigenvalues against a library solver") {
  RngStream rng(78, 0);
  for (int n : {2, 17, 64, 150}) {
    const auto a = sample_ginibre_matrix(n, rng);
    Eigen::MatrixXcd m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = a[static_cast<std::size_t>(i * n + j)];
    const Eigen::VectorXcd ev = Eigen::ComplexEigenSolver<Eigen::MatrixXcd>(m, false).eigenvalues();
    CHECK(match_distance(eig_dense(a, n), std::vector<cplx>(ev.data(), ev.data() + n)) < 1e-10);
    check_trace_contract(a, n);
  }
}

TEST_CASE("dense eigenvalues: structured matrices") {
  // Hermitian: eigenvalues are real.
  RngStream rng(79, 0);
  const int n = 40;
  auto a = sample_ginibre_matrix(n, rng);
  std::vector<cplx> h(a.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      h[static_cast<std::size_t>(i * n + j)] = a[static_cast<std::size_t>(i * n + j)] + std::conj(a[static_cast<std::size_t>(j * n + i)]);
  double max_imag = 0.0;
  for (const cplx& z : eig_dense(h, n)) max_imag = std::max(max_imag, std::abs(z.imag()));
  CHECK(max_imag < 1e-12);
  check_trace_contract(h, n);

  // Cyclic shift: the N-th roots of unity, a classic stall case for
  // unshifted iterations.
  std::vector<cplx> shift(static_cast<std::size_t>(n * n), 0.0);
  for (int i = 0; i < n; ++i) shift[static_cast<std::size_t>(((i + 1) % n) * n + i)] = 1.0;
  std::vector<cplx> roots;
  for (int k = 0; k < n; ++k) roots.push_back(std::polar(1.0, 2 * std::numbers::pi * k / n));
  CHECK(match_distance(eig_dense(shift, n), roots) < 1e-10);

  // Badly scaled entries.
  auto scaled = sample_ginibre_matrix(30, rng);
  for (cplx& z : scaled) z *= 1e150;
  check_trace_contract(scaled, 30);
}

TEST_CASE("single point ginibre sample is the entry") {
  RngStream a(4, 2), b(4, 2);
  const auto m = sample_ginibre_matrix(1, a);
  CHECK(sample_ginibre_eigenvalues(1, b) == m);
}

TEST_CASE("ginibre eigenvalue sum equals trace") {
  RngStream rng(11, 0), copy(11, 0);
  for (int n : {5, 64, 200}) {
    const auto a = sample_ginibre_matrix(n, rng);
    const auto ev = sample_ginibre_eigenvalues(n, copy);
    cplx tr = 0.0, s = 0.0;
    for (int i = 0; i < n; ++i) tr += a[static_cast<std::size_t>(i * n + i)];
    for (const cplx& z : ev) s += z;
    CHECK(std::abs(s - tr) <= 1e-10 * n);
  }
}

TEST_CASE("covariance estimator") {
  const auto zero = estimate_cov(std::vector<double>(10, 3.0), std::vector<double>(10, -1.0));
  CHECK(zero.cov == 0.0);
  CHECK(zero.se == 0.0);
  const std::vector<double> f{1.0, 4.0, 2.0, 8.0, 5.0, 7.0};
  const std::vector<double> g{0.5, 1.0, -2.0, 3.0, 0.0, 2.5};
  CHECK(estimate_cov(f, f).cov == doctest::Approx(7.5));
  // Jackknife by explicit deletion.
  auto cov = [](const std::vector<double>& x, const std::vector<double>& y) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      mx += x[i];
      my += y[i];
    }
    mx /= x.size();
    my /= y.size();
    double s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - mx) * (y[i] - my);
    return s / (x.size() - 1.0);
  };
  std::vector<double> loo;
  for (std::size_t i = 0; i < f.size(); ++i) {
    auto fx = f, gx = g;
    fx.erase(fx.begin() + static_cast<std::ptrdiff_t>(i));
    gx.erase(gx.begin() + static_cast<std::ptrdiff_t>(i));
    loo.push_back(cov(fx, gx));
  }
  double m = 0;
  for (double x : loo) m += x;
  m /= loo.size();
  double v = 0;
  for (double x : loo) v += (x - m) * (x - m);
  const auto est = estimate_cov(f, g);
  CHECK(est.cov == doctest::Approx(cov(f, g)));
  CHECK(est.se == doctest::Approx(std::sqrt(v * (f.size() - 1.0) / f.size())));
  CHECK_THROWS_AS(estimate_cov({1.0}, {1.0}), DomainError);
  CHECK_THROWS_AS(estimate_cov({1.0, 2.0}, {1.0}), DomainError);
}

TEST_CASE("kolmogorov-smirnov calibration") {
  int passes = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    RngStream rng(seed, 0);
    std::vector<double> x(10000);
    for (double& v : x) v = rng.normal();
    passes += ks_normal_test(x).pass ? 1 : 0;
  }
  CHECK(passes >= 49);
  RngStream rng(1, 1);
  std::vector<double> u(10000);
  for (double& v : u) v = rng.uniform();
  const auto r = ks_normal_test(u);
  CHECK_FALSE(r.pass);
  CHECK(r.statistic > 3 * r.threshold);
  CHECK_THROWS_AS(ks_normal_test(std::vector<double>(50, 0.0)), DomainError);
  CHECK_THROWS_AS(ks_normal_test(std::vector<double>(500, 1.0)), DomainError);
}

TEST_CASE("normalized annulus count is gaussian") {
  const auto ind = [](cplx z) {
    const double r = std::abs(z);
    return (r >= 0.5 && r <= 0.9) ? 1.0 : 0.0;
  };
  const auto batch = run_replicas({1000, Ensemble::complex, 10000, 2024, {{"count", ind, true}}});
  // The count is integer valued with sd ≈ 5, so the raw distance is held
  // near φ(0)/(2 sd) ≈ 0.04 by the lattice alone.
  const auto raw = ks_normal_test(batch.column(0));
  CHECK_FALSE(raw.pass);
  CHECK(raw.statistic < 0.06);
  CHECK(ks_normal_test(batch.column(0), 1.0).pass);
}

TEST_CASE("lattice correction on a binomial sample") {
  RngStream rng(3, 0);
  std::vector<double> x(10000);
  for (double& v : x) {
    int c = 0;
    for (int i = 0; i < 400; ++i) c += rng.uniform() < 0.5 ? 1 : 0;
    v = c;
  }
  CHECK(ks_normal_test(x, 1.0).pass);
  // Treating a fine lattice as coarse breaks the match.
  std::vector<double> y(10000);
  for (double& v : y) v = std::round(rng.normal() * 30.0);
  CHECK(ks_normal_test(y, 1.0).pass);
  CHECK_FALSE(ks_normal_test(y, 20.0).pass);
}

TEST_CASE("batches are independent of the thread count") {
  const auto arg = [](cplx z) { return std::cos(std::arg(z)); };
  const auto r = [](cplx z) { return std::abs(z); };
  RunConfig cfg{12, Ensemble::complex, 64, 99, {{"cos", arg, false}, {"r", r, true}}, true};
  const std::size_t saved = thread_count();
  set_thread_count(1);
  const auto one = run_replicas(cfg);
  set_thread_count(4);
  const auto four = run_replicas(cfg);
  set_thread_count(saved);
  std::ostringstream a, b;
  write_batch(one, a);
  write_batch(four, b);
  CHECK(a.str() == b.str());
  CHECK(one.eigenvalues.size() == 64u * 12u);
}

TEST_CASE("batch persistence") {
  const auto r2 = [](cplx z) { return std::norm(z); };
  auto batch = run_replicas({7, Ensemble::quaternion, 5, 123, {{"r2", r2, true}, {"r4", [](cplx z) { return std::norm(z) * std::norm(z); }, true}}});
  std::stringstream buf;
  write_batch(batch, buf);
  const std::string bytes = buf.str();
  CHECK(bytes.substr(0, 8) == "GINIBRE1");
  // 80-byte header, two names with u32 lengths, 10 values.
  CHECK(bytes.size() == 80u + (4 + 2) * 2 + 10 * 8);
  const auto back = read_batch(buf);
  CHECK(back == batch);
  CHECK(back.generator == "philox4x32-10");

  std::ostringstream csv;
  write_batch_csv(batch, csv);
  std::istringstream lines(csv.str());
  std::string line;
  std::getline(lines, line);
  CHECK(line.rfind("# n=7,ensemble=quaternion,seed=123", 0) == 0);
  std::getline(lines, line);
  CHECK(line == "replica,r2,r4");
  int rows = 0;
  while (std::getline(lines, line)) ++rows;
  CHECK(rows == 5);

  std::stringstream bad("GINIBRE2");
  CHECK_THROWS_AS(read_batch(bad), DomainError);
  std::stringstream truncated(bytes.substr(0, 100));
  CHECK_THROWS_AS(read_batch(truncated), DomainError);
}

TEST_CASE("run configuration errors") {
  const auto ang = [](cplx z) { return std::arg(z); };
  CHECK_THROWS_AS(run_replicas({4, Ensemble::quaternion, 3, 1, {{"a", ang, false}}}), DomainError);
  CHECK_THROWS_AS(run_replicas({4, Ensemble::complex, 0, 1, {{"a", ang, false}}}), DomainError);
  CHECK_THROWS_AS(run_replicas({4, Ensemble::complex, 3, 1, {}}), DomainError);
  CHECK_THROWS_AS(run_replicas({600, Ensemble::complex, 1, 1, {{"a", ang, false}}}), DomainError);
}
