#include "ginibre/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <queue>

#include "ginibre/error.hpp"

namespace ginibre::quad {

namespace {

// Nodes and weights on [−1, 1] by Newton iteration on P_n.
QuadratureRule unit_rule(std::size_t n) {
  QuadratureRule rule;
  rule.lo = -1.0;
  rule.hi = 1.0;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const std::size_t half = (n + 1) / 2;
  const double dn = static_cast<double>(n);
  for (std::size_t i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (dn + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t j = 2; j <= n; ++j) {
        const double dj = static_cast<double>(j);
        const double p2 = ((2.0 * dj - 1.0) * x * p1 - (dj - 1.0) * p0) / dj;
        p0 = p1;
        p1 = p2;
      }
      dp = dn * (x * p1 - p0) / (x * x - 1.0);
      const double step = p1 / dp;
      x -= step;
      if (std::abs(step) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

}  // namespace

const QuadratureRule& reference_rule(std::size_t n) {
  static std::mutex mutex;
  static std::map<std::size_t, std::unique_ptr<QuadratureRule>> cache;
  if (n < 2) detail::domain_fail("legendre_rule: need at least 2 nodes");
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<QuadratureRule>(unit_rule(n));
  return *slot;
}

QuadratureRule legendre_rule(std::size_t n, double lo, double hi) {
  if (!(hi > lo)) detail::domain_fail("legendre_rule: need lo < hi");
  const QuadratureRule& unit = reference_rule(n);
  QuadratureRule rule;
  rule.lo = lo;
  rule.hi = hi;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double half = 0.5 * (hi - lo);
  const double mid = 0.5 * (hi + lo);
  for (std::size_t i = 0; i < n; ++i) {
    rule.nodes[i] = mid + half * unit.nodes[i];
    rule.weights[i] = half * unit.weights[i];
  }
  return rule;
}

AdaptiveResult integrate_adaptive(const std::function<double(double)>& f, double lo, double hi,
                                  double abs_tol, double rel_tol, std::size_t max_intervals) {
  if (!(hi >= lo)) detail::domain_fail("integrate_adaptive: need lo <= hi");
  AdaptiveResult out;
  if (hi == lo) return out;
  const QuadratureRule& coarse = reference_rule(15);
  const QuadratureRule& fine = reference_rule(30);

  struct Panel {
    double lo, hi, value, error;
    bool operator<(const Panel& other) const { return error < other.error; }
  };
  auto evaluate = [&](double a, double b) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double c = 0.0;
    double g = 0.0;
    for (std::size_t i = 0; i < coarse.size(); ++i) c += coarse.weights[i] * f(mid + half * coarse.nodes[i]);
    for (std::size_t i = 0; i < fine.size(); ++i) g += fine.weights[i] * f(mid + half * fine.nodes[i]);
    return Panel{a, b, g * half, std::abs(g - c) * half};
  };

  std::priority_queue<Panel> heap;
  heap.push(evaluate(lo, hi));
  double total = heap.top().value;
  double error = heap.top().error;
  while (error > std::max(abs_tol, rel_tol * std::abs(total))) {
    if (heap.size() >= max_intervals) {
      detail::numerical_fail("integrate_adaptive: interval budget exhausted");
    }
    const Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    const Panel left = evaluate(worst.lo, mid);
    const Panel right = evaluate(mid, worst.hi);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  // Re-sum from the panels so the running-update rounding does not leak out.
  out.intervals = heap.size();
  double value = 0.0;
  double err = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  out.value = value;
  out.error_estimate = err;
  return out;
}

}  // namespace ginibre::quad
