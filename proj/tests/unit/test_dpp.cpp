#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "ginibre/dpp.hpp"
#include "ginibre/error.hpp"
#include "ginibre/specfun.hpp"
#include "support/oracles.hpp"

using namespace ginibre;
using namespace ginibre::dpp;
using angular::ArcWindow;

namespace {

using oracle::bernoulli_sum_cumulants;

Eigen::VectorXd hermitian_eigenvalues(const GramOperator& g) {
  const int n = g.dimension();
  Eigen::MatrixXcd m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = g(i, j);
  }
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(m, Eigen::EigenvaluesOnly).eigenvalues();
}

}  // namespace

TEST_CASE("annulus gram operator") {
  const auto whole = gram_annulus(16, 0.0, specfun::kInf);
  CHECK(whole.structure() == Structure::diagonal);
  CHECK(whole.trace() == doctest::Approx(16.0).epsilon(1e-14));
  for (int i = 0; i < 16; ++i) CHECK(whole(i, i).real() == doctest::Approx(1.0).epsilon(1e-14));

  const auto g = gram_annulus(256, 0.4, 0.8);
  const auto p = radial::count_probabilities(256, {0.4, 0.8});
  for (int l = 0; l < 256; l += 17) {
    CHECK(std::abs(g(l, l).real() - p[static_cast<std::size_t>(l)]) <= 1e-12);
    CHECK(g(l, (l + 1) % 256) == angular::cplx{});
  }
  const auto cs = cumulants_from_gram(g, 4);
  CHECK(cs.c(2) == doctest::Approx(radial::radial_count_var(256, 0.4, 0.8)).epsilon(1e-10));
  CHECK(cs.c(1) == doctest::Approx(radial::radial_count_mean(256, 0.4, 0.8)).epsilon(1e-12));
}

TEST_CASE("sector gram operator") {
  const auto full = gram_sector(24, ArcWindow{});
  for (int i = 0; i < 24; ++i) {
    for (int j = 0; j < 24; ++j) {
      CHECK(std::abs(full(i, j) - (i == j ? 1.0 : 0.0)) <= 1e-14);
    }
  }
  for (double arc : {0.3, std::numbers::pi / 2, 5.0}) {
    const auto g = gram_sector(40, ArcWindow::centered(0.4, arc));
    CHECK(g.structure() == Structure::sector);
    CHECK(g.trace() == doctest::Approx(40 * arc / (2 * std::numbers::pi)).epsilon(1e-13));
    CHECK(g(3, 7) == std::conj(g(7, 3)));
  }
  const ArcWindow quarter = ArcWindow::symmetric(std::numbers::pi / 2);
  const auto g128 = gram_sector(128, quarter);
  const auto cs = cumulants_from_gram(g128, 2);
  CHECK(cs.c(1) == doctest::Approx(angular::angular_count_mean(128, quarter)).epsilon(1e-12));
  CHECK(cs.c(2) == doctest::Approx(angular::angular_count_var(128, quarter)).epsilon(1e-8));

  // Off-centre arcs make the operator genuinely complex; the variance must
  // not depend on the rotation.
  const auto rotated = gram_sector(96, ArcWindow::centered(1.1, std::numbers::pi / 2));
  CHECK(std::abs(rotated(0, 1).imag()) > 1e-3);
  CHECK(cumulants_from_gram(rotated, 4).c(2) ==
        doctest::Approx(angular::angular_count_var(96, quarter)).epsilon(1e-10));
}

TEST_CASE("sector spectra lie in the unit interval") {
  for (int n : {1, 5, 17, 64}) {
    for (double arc : {0.01, 1.0, std::numbers::pi, 6.0}) {
      CAPTURE(n);
      CAPTURE(arc);
      const auto ev = hermitian_eigenvalues(gram_sector(n, ArcWindow::centered(-0.1, arc)));
      CHECK(ev.minCoeff() >= -1e-10);
      CHECK(ev.maxCoeff() <= 1.0 + 1e-10);
    }
  }
  const auto [lo, hi] = gram_annulus(30, 0.2, 0.9).gershgorin();
  CHECK(lo >= 0.0);
  CHECK(hi <= 1.0);
}

TEST_CASE("trace inequalities") {
  for (const auto& g : {gram_sector(64, ArcWindow::centered(0.2, 2.0)), gram_annulus(200, 0.3, 0.7)}) {
    const auto cs = cumulants_from_gram(g, 6);
    const double base = cs.traces[0] - cs.traces[1];
    CHECK(base > 0.0);
    for (int l = 3; l <= 6; ++l) {
      const double gap = cs.traces[0] - cs.traces[static_cast<std::size_t>(l - 1)];
      CHECK(gap >= -1e-12);
      CHECK(gap <= (l - 1) * base * (1 + 1e-12));
    }
  }
}

TEST_CASE("bernoulli cumulant polynomials") {
  CHECK(bernoulli_cumulant_coefficients(2) == std::vector<double>{0, 1});
  CHECK(bernoulli_cumulant_coefficients(3) == std::vector<double>{0, 1});
  CHECK(bernoulli_cumulant_coefficients(4) == std::vector<double>{0, 1, -6});
  CHECK(bernoulli_cumulant_coefficients(6) == std::vector<double>{0, 1, -30, 120});
}

TEST_CASE("cumulants of independent indicators against enumeration") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 10;
    std::vector<double> p(static_cast<std::size_t>(n));
    for (double& x : p) x = u(rng);
    if (trial == 3) p.assign(static_cast<std::size_t>(n), 0.5);
    const auto want = bernoulli_sum_cumulants(p, 12);
    const auto from_gram = cumulants_from_gram(GramOperator::diagonal(p), 12);
    const auto perm = cumulants_permanental(p, 12);
    for (int k = 1; k <= 12; ++k) {
      CAPTURE(trial);
      CAPTURE(k);
      // Rounding scale of the evaluation: Σ|c_j| (¼)^j per indicator.
      double scale = 1.0;
      if (k > 1) {
        scale = 0.0;
        const auto c = bernoulli_cumulant_coefficients(k);
        for (std::size_t j = 0; j < c.size(); ++j) scale += std::abs(c[j]) * std::pow(0.25, j);
      }
      const double tol = 1e-15 * n * std::max(1.0, scale);
      CHECK(std::abs(from_gram.c(k) - want[static_cast<std::size_t>(k - 1)]) <= tol);
      CHECK(from_gram.c(k) == perm.c(k));
      CHECK(from_gram.u(k) == perm.u(k));
    }
  }
  CHECK(cumulants_permanental({0.5}, 3).c(3) == 0.0);
  CHECK(cumulants_permanental({0.2, 0.7}, 2).c(2) == doctest::Approx(0.37).epsilon(1e-15));
  CHECK_THROWS_AS(cumulants_permanental({1.2}, 2), DomainError);
  CHECK_THROWS_AS(cumulants_permanental({0.5}, 13), DomainError);
}

TEST_CASE("cumulants agree with the stirling inversion of cluster functions") {
  const auto g = gram_sector(48, ArcWindow::centered(0.5, 2.5));
  const auto cs = cumulants_from_gram(g, 12);
  CHECK(cs.u(1) == doctest::Approx(g.trace()));
  for (int n = 1; n <= 12; ++n) {
    oracle::Wide acc = 0, scale = 0;
    for (int k = 1; k <= n; ++k) {
      const oracle::Wide term = oracle::Wide(specfun::stirling2(n, k)) * cs.u(k);
      acc += term;
      scale += abs(term);
    }
    CAPTURE(n);
    CHECK(std::abs(static_cast<double>(acc) - cs.c(n)) <= 1e-13 * static_cast<double>(scale));
  }
}

TEST_CASE("dense cumulants against eigenvalue route") {
  const auto g = gram_sector(40, ArcWindow::centered(-1.0, 1.3));
  const auto ev = hermitian_eigenvalues(g);
  std::vector<double> lambda(ev.data(), ev.data() + ev.size());
  for (double& x : lambda) x = std::clamp(x, 0.0, 1.0);
  const auto want = bernoulli_sum_cumulants(lambda, 8);
  const auto got = cumulants_from_gram(g, 8);
  for (int k = 1; k <= 8; ++k) {
    CAPTURE(k);
    CHECK(got.c(k) == doctest::Approx(want[static_cast<std::size_t>(k - 1)]).epsilon(1e-10));
  }
}

TEST_CASE("quaternion radial count as independent indicators") {
  const auto p = radial::count_probabilities(256, {0.4, 0.8}, Ensemble::quaternion);
  const auto cs = cumulants_permanental(p, 4);
  CHECK(cs.c(2) == doctest::Approx(radial::radial_count_var(256, 0.4, 0.8, Ensemble::quaternion))
                       .epsilon(1e-12));
}

TEST_CASE("clt certificate") {
  CHECK_THROWS_AS(clt_certificate(cumulants_from_gram(gram_annulus(8, 0.0, specfun::kInf), 4)),
                  DomainError);
  const auto annulus = clt_certificate(cumulants_from_gram(gram_annulus(1024, 0.4, 0.8), 8));
  REQUIRE(annulus.normalized.size() == 6);
  CHECK(std::abs(annulus.normalized[0]) <= 0.1);
  CHECK(annulus.clt_consistent);
  CHECK(annulus.bound_witness <= 1.0);

  std::vector<double> c3, c4;
  for (int n : {64, 128, 256}) {
    const auto cert = clt_certificate(cumulants_from_gram(
        gram_sector(n, ArcWindow::centered(0.3, std::numbers::pi / 2)), 6));
    CHECK(cert.bound_witness <= 1.0);
    c3.push_back(std::abs(cert.normalized[0]));
    c4.push_back(std::abs(cert.normalized[1]));
  }
  CHECK(c3[1] < c3[0]);
  CHECK(c3[2] < c3[1]);
  CHECK(c4[1] < c4[0]);
  CHECK(c4[2] < c4[1]);
}

TEST_CASE("gram operator validation") {
  CHECK_THROWS_AS(GramOperator::dense(2, {1.0, 0.5, 0.2, 1.0}), DomainError);
  CHECK_THROWS_AS(GramOperator::dense(2, {1.0, 0.5}), DomainError);
  CHECK_THROWS_AS(GramOperator::diagonal({}), DomainError);
  CHECK_THROWS_AS(gram_sector(0, ArcWindow{}), DomainError);
  CHECK_THROWS_AS(gram_annulus(4, 0.5, 0.2), DomainError);
}
