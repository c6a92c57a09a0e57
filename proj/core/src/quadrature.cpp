#include "boldg/quadrature.hpp"

#include <array>
#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace boldg {

LegendreValue legendre_polynomial(int n, double x) {
  if (n == 0) return {1.0, 0.0};
  double p_prev = 1.0;
  double p = x;
  double dp_prev = 0.0;
  double dp = 1.0;
  for (int m = 1; m < n; ++m) {
    const double p_next = ((2.0 * m + 1.0) * x * p - m * p_prev) / (m + 1.0);
    const double dp_next = dp_prev + (2.0 * m + 1.0) * p;
    p_prev = p;
    p = p_next;
    dp_prev = dp;
    dp = dp_next;
  }
  return {p, dp};
}

namespace {

QuadRule build_rule(int n) {
  QuadRule rule;
  rule.n = n;
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 0.0);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Chebyshev-type asymptotic guess for the i-th largest root.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre_polynomial(n, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) <= 1e-15) break;
    }
    const auto [p, dp] = legendre_polynomial(n, x);
    (void)p;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // Fill symmetric pairs so the rule is exactly symmetric.
    rule.nodes[n - 1 - i] = x;
    rule.nodes[i] = -x;
    rule.weights[n - 1 - i] = w;
    rule.weights[i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

std::mutex cache_mutex;
std::array<std::unique_ptr<const QuadRule>, kMaxGaussPoints + 1> cache;

}  // namespace

const QuadRule& gauss_legendre(int n) {
  if (n < 1 || n > kMaxGaussPoints) {
    throw std::invalid_argument("gauss_legendre: point count must be in [1, 64], got " + std::to_string(n));
  }
  {
    std::lock_guard lock(cache_mutex);
    if (cache[n]) return *cache[n];
  }
  // Build outside the lock; a concurrent duplicate build is discarded.
  auto rule = std::make_unique<const QuadRule>(build_rule(n));
  std::lock_guard lock(cache_mutex);
  if (!cache[n]) cache[n] = std::move(rule);
  return *cache[n];
}

}  // namespace boldg
