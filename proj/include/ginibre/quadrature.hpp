#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace ginibre::quad {

/// Gauss–Legendre nodes and weights mapped onto [lo, hi].
struct QuadratureRule {
  std::vector<double> nodes;    // strictly increasing
  std::vector<double> weights;  // positive, summing to hi − lo
  double lo = 0.0;
  double hi = 1.0;

  std::size_t size() const { return nodes.size(); }

  template <class F>
  double integrate(F&& f) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(nodes[i]);
    return acc;
  }
};

/// n-point rule, exact for polynomials of degree ≤ 2n − 1. Requires n ≥ 2.
QuadratureRule legendre_rule(std::size_t n, double lo, double hi);

/// Cached rule on [−1, 1]; the returned reference stays valid for the
/// lifetime of the program. Thread-safe.
const QuadratureRule& reference_rule(std::size_t n);

struct AdaptiveResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t intervals = 0;
};

/// Globally adaptive Gauss–Legendre integration: each panel is estimated
/// with 15- and 30-point rules, the panel with the largest discrepancy is
/// bisected until the summed discrepancy is below max(abs_tol, rel_tol·|I|).
/// Throws NumericalError if max_intervals is exhausted.
AdaptiveResult integrate_adaptive(const std::function<double(double)>& f, double lo,
                                  double hi, double abs_tol = 1e-12,
                                  double rel_tol = 1e-12,
                                  std::size_t max_intervals = 4000);

}  // namespace ginibre::quad
