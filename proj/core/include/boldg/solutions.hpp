#pragma once

#include <optional>
#include <vector>

#include "boldg/mesh.hpp"
#include "boldg/projection.hpp"

namespace boldg {

/// Amplitude convention for the periodic one-soliton
///   U(x, t) = A / (1 - sqrt(1 - delta^2) cos(c delta (x - c t))),  delta = pi / (c L).
///  - pde_consistent: A = 2 c delta^2, which solves u_t + u u_x - H u_xx = 0
///  - as_published:   A = 2 c delta, the commonly quoted form, which solves the
///                    equation only after rescaling u by 1/delta
enum class SolitonNormalization { pde_consistent, as_published };

/// Spatially periodic traveling wave with speed c and period 2L.
class OneSoliton {
 public:
  OneSoliton(double c, double half_period, SolitonNormalization normalization = SolitonNormalization::pde_consistent);

  double operator()(double x, double t) const;

  double speed() const noexcept { return c_; }
  double half_period() const noexcept { return half_period_; }
  double delta() const noexcept { return delta_; }
  double amplitude() const noexcept { return amplitude_; }
  SolitonNormalization normalization() const noexcept { return normalization_; }

 private:
  double c_;
  double half_period_;
  double delta_;
  double amplitude_;
  double root_;  // sqrt(1 - delta^2)
  SolitonNormalization normalization_;
};

/// Rational two-soliton on the line, with lambda_i = x - c_i t - d_i.
class TwoSoliton {
 public:
  TwoSoliton(double c1, double c2, double d1, double d2);

  double operator()(double x, double t) const;

  double c1() const noexcept { return c1_; }
  double c2() const noexcept { return c2_; }
  double d1() const noexcept { return d1_; }
  double d2() const noexcept { return d2_; }

 private:
  double c1_, c2_, d1_, d2_;
};

using SpaceTimeFunction = std::function<double(double, double)>;

/// L2(Omega) distance between u_h and U(., t), elementwise Gauss quadrature with
/// `points` nodes (0 selects k + 3).
double l2_error(const Field& uh, const SpaceTimeFunction& exact, double t, int points = 0);

struct ConservedQuantities {
  std::optional<double> c1;  // int u / int u0; empty when int u0 == 0
  std::optional<double> c2;  // |u| / |u0|; empty when |u0| == 0
};

/// Mass and norm of u_h relative to u0, by Gauss quadrature with k + 3 nodes.
ConservedQuantities conserved_quantities(const Field& uh, const Field& u0);

/// Pairwise rates ln(E_i / E_{i+1}) / ln(N_{i+1} / N_i).
std::vector<double> convergence_rate(const std::vector<double>& errors, const std::vector<int>& cells);

}  // namespace boldg
