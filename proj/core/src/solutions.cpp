#include "boldg/solutions.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "boldg/errors.hpp"

namespace boldg {

OneSoliton::OneSoliton(double c, double half_period, SolitonNormalization normalization)
    : c_(c), half_period_(half_period), normalization_(normalization) {
  if (!(c > 0.0) || !(half_period > 0.0)) throw ConfigError("one-soliton: c and L must be positive");
  delta_ = std::numbers::pi / (c * half_period);
  if (!(delta_ < 1.0)) {
    throw ConfigError("one-soliton: delta = pi / (c L) = " + std::to_string(delta_) + " must be below 1");
  }
  root_ = std::sqrt(1.0 - delta_ * delta_);
  amplitude_ = normalization == SolitonNormalization::pde_consistent ? 2.0 * c * delta_ * delta_ : 2.0 * c * delta_;
}

double OneSoliton::operator()(double x, double t) const {
  return amplitude_ / (1.0 - root_ * std::cos(c_ * delta_ * (x - c_ * t)));
}

TwoSoliton::TwoSoliton(double c1, double c2, double d1, double d2) : c1_(c1), c2_(c2), d1_(d1), d2_(d2) {
  if (!(c1 > 0.0) || !(c2 > 0.0)) throw ConfigError("two-soliton: speeds must be positive");
  if (c1 == c2) throw ConfigError("two-soliton: speeds must differ");
}

double TwoSoliton::operator()(double x, double t) const {
  const double l1 = x - c1_ * t - d1_;
  const double l2 = x - c2_ * t - d2_;
  const double dc2 = (c1_ - c2_) * (c1_ - c2_);
  const double sum = c1_ + c2_;
  const double num = 4.0 * c1_ * c2_ * (c1_ * l1 * l1 + c2_ * l2 * l2 + sum * sum * sum / (c1_ * c2_ * dc2));
  const double a = c1_ * c2_ * l1 * l2 - sum * sum / dc2;
  const double b = c1_ * l1 + c2_ * l2;
  return num / (a * a + b * b);
}

double l2_error(const Field& uh, const SpaceTimeFunction& exact, double t, int points) {
  const DGSpace& space = uh.space();
  const QuadRule& rule = gauss_legendre(points == 0 ? space.degree() + 3 : points);
  const Mesh& mesh = space.mesh();
  double s = 0.0;
  for (int i = 0; i < space.cells(); ++i) {
    double cell = 0.0;
    for (int q = 0; q < rule.n; ++q) {
      const double xi = rule.nodes[q];
      const double e = uh.value_in_cell(i, xi) - exact(mesh.to_physical(i, xi), t);
      cell += rule.weights[q] * e * e;
    }
    s += 0.5 * mesh.width(i) * cell;
  }
  return std::sqrt(s);
}

ConservedQuantities conserved_quantities(const Field& uh, const Field& u0) {
  require_same_space(uh.space(), u0.space(), "conserved_quantities");
  const int points = uh.space().degree() + 3;
  const double mass0 = u0.integral();
  const double norm0 = u0.l2_norm_quadrature(points);
  ConservedQuantities q;
  if (mass0 != 0.0) q.c1 = uh.integral() / mass0;
  if (norm0 != 0.0) q.c2 = uh.l2_norm_quadrature(points) / norm0;
  return q;
}

std::vector<double> convergence_rate(const std::vector<double>& errors, const std::vector<int>& cells) {
  if (errors.size() != cells.size() || errors.size() < 2) {
    throw std::invalid_argument("convergence_rate: need equal-length arrays with at least two entries");
  }
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!(errors[i] > 0.0)) throw std::invalid_argument("convergence_rate: errors must be positive");
    if (i > 0 && cells[i] <= cells[i - 1]) throw std::invalid_argument("convergence_rate: N must increase");
  }
  std::vector<double> rates;
  for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
    rates.push_back((std::log(errors[i]) - std::log(errors[i + 1])) /
                    (std::log(static_cast<double>(cells[i + 1])) - std::log(static_cast<double>(cells[i]))));
  }
  return rates;
}

}  // namespace boldg
