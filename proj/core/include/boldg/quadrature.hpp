#pragma once

#include <vector>

namespace boldg {

/// Gauss-Legendre rule on the reference interval [-1, 1].
struct QuadRule {
  int n = 0;
  std::vector<double> nodes;    // strictly increasing, symmetric about 0
  std::vector<double> weights;  // positive, summing to 2
};

inline constexpr int kMaxGaussPoints = 64;

/// Returns the n-point rule, 1 <= n <= 64. Rules are built once and cached;
/// the returned reference stays valid for the lifetime of the program.
const QuadRule& gauss_legendre(int n);

/// Legendre polynomial P_n(x) and its derivative.
struct LegendreValue {
  double value;
  double derivative;
};
LegendreValue legendre_polynomial(int n, double x);

}  // namespace boldg
