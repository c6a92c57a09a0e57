#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <string>

#include "boldg/operators.hpp"

namespace boldg {

/// Largest eigenvalue of the symmetric part of M^{1/2} L M^{-1/2}. L is
/// semi-negative in the M-inner product iff the result is <= 0. An empty mass
/// vector means M = I. Dense; limited to dimension kMaxDenseEigen.
double check_semi_negative(const Eigen::MatrixXd& lh, const Eigen::VectorXd& mass = {});

inline constexpr Eigen::Index kMaxDenseEigen = 4096;

/// Coefficients (alpha_ij), i, j = 0..3, of the quadratic part of the one-step
/// energy identity for the four-stage Runge-Kutta polynomial.
const Eigen::Matrix4d& energy_coefficients();

/// One step of |P4(tau L) u|^2 - |u|^2, computed directly and from the identity
///   Q(u) = |L^4 u|^2 / 576 - |L^3 u|^2 / 72 + sum alpha_ij [L^i u, L^j u],
/// where L stands for tau L and [v, w] = -(v, (L + L^T) w). All norms are M-weighted.
struct EnergyReport {
  int step = 0;
  double norm_sq_before = 0.0;
  double norm_sq_after = 0.0;
  double direct_change = 0.0;
  double q_value = 0.0;
  double dissipation_part = 0.0;
  double quadratic_part = 0.0;

  double residual() const { return direct_change - q_value; }
};

EnergyReport energy_change(const Eigen::VectorXd& u, const Eigen::MatrixXd& lh, double tau,
                           const Eigen::VectorXd& mass = {});

/// Exact rational number with 64-bit numerator and denominator.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(long long num, long long den = 1);

  long long num() const noexcept { return num_; }
  long long den() const noexcept { return den_; }
  double to_double() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }
  std::string str() const;

  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a);
  friend bool operator==(const Rational& a, const Rational& b) = default;

 private:
  long long num_ = 0;
  long long den_ = 1;
};

template <int R, int C>
using RationalMatrix = std::array<std::array<Rational, C>, R>;

Eigen::MatrixXd to_dense(const RationalMatrix<3, 3>& m);
RationalMatrix<3, 3> operator+(const RationalMatrix<3, 3>& a, const RationalMatrix<3, 3>& b);

/// Matrices of the two- and three-step stability argument.
struct CompositeMatrices {
  RationalMatrix<3, 3> a0;
  RationalMatrix<3, 3> a1;
  RationalMatrix<3, 3> a2;
  RationalMatrix<3, 3> a;  // as tabulated
  Eigen::Vector3d eigenvalues;  // of a, ascending
};

/// The tabulated matrices, with eigenvalues of A computed here.
CompositeMatrices build_composite_matrices();

/// The same matrices derived from energy_coefficients(): A0 is the leading 3x3
/// block of alpha, and each further step composes the previous (untruncated)
/// quadratic form with P4, alpha'_ij = sum alpha_ab p_c p_d over a + c = i, b + d = j.
/// A is the sum of the derived matrices.
CompositeMatrices derive_composite_matrices();

/// Spectral norm via power iteration on L^T L (relative tolerance 1e-6, at most
/// 10000 iterations). Throws NumericalError with the last estimate on non-convergence.
double operator_norm(const Eigen::MatrixXd& l);
/// Norm of M^{1/2} Lh M^{-1/2}, matrix-free.
double operator_norm(const OperatorSet& ops);

/// P4(tau L) as a dense matrix.
Eigen::MatrixXd rk4_polynomial(const Eigen::MatrixXd& l, double tau);

/// Applies P4(tau L) `steps` times to `trials` seeded random unit fields (M-norm)
/// and returns max |u^steps| / |u^0|. Requires tau |L| <= c0.
double multistep_stability_trial(const Eigen::MatrixXd& lh, double tau, int steps, int trials, std::uint64_t seed,
                                 const Eigen::VectorXd& mass = {}, double c0 = 2.0);

/// Worst ratios |u^{n+s}| / |u^n| over 0 <= n <= horizon - s for s = 1, 2, 3.
struct MultistepScan {
  double worst_one_step = 0.0;
  double worst_two_step = 0.0;
  double worst_three_step = 0.0;
};
MultistepScan multistep_stability_scan(const Eigen::MatrixXd& lh, double tau, int horizon, int trials,
                                       std::uint64_t seed, const Eigen::VectorXd& mass = {}, double c0 = 2.0);

/// Largest c = tau |L| (bisection on [0, c_max]) for which the worst `steps`-step
/// ratio over the horizon stays within 1 + 1e-12.
double empirical_stability_boundary(const Eigen::MatrixXd& lh, int steps, int horizon, int trials, std::uint64_t seed,
                                    const Eigen::VectorXd& mass = {}, double c_max = 4.0, int bisections = 30);

struct StabilityOptions {
  double tau_times_norm = 1.0;  // tau |Lh| for the trial runs
  int horizon = 50;
  int trials = 100;
  int energy_trials = 100;
  std::uint64_t seed = 1;
  bool scan_boundary = true;
};

struct StabilityReport {
  double operator_norm = 0.0;
  double max_symmetric_eigenvalue = 0.0;
  double tau = 0.0;
  MultistepScan scan;
  double energy_residual_max = 0.0;  // max |direct - Q| / |u|^2 over the energy trials
  double boundary_two_step = 0.0;
  double boundary_three_step = 0.0;
  std::uint64_t seed = 0;
};

/// Runs the checks above on the f = 0 operator of `ops`.
StabilityReport stability_report(const OperatorSet& ops, const StabilityOptions& options);

}  // namespace boldg
