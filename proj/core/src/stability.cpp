#include "boldg/stability.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "boldg/errors.hpp"
#include "boldg/linalg.hpp"

namespace boldg {

namespace {

Eigen::VectorXd sqrt_mass(const Eigen::VectorXd& mass, Eigen::Index dim) {
  if (mass.size() == 0) return Eigen::VectorXd::Ones(dim);
  if (mass.size() != dim) throw std::invalid_argument("mass vector size does not match the operator");
  if ((mass.array() <= 0.0).any()) throw std::invalid_argument("mass entries must be positive");
  return mass.cwiseSqrt();
}

// M^{1/2} L M^{-1/2}.
Eigen::MatrixXd scaled(const Eigen::MatrixXd& l, const Eigen::VectorXd& mass) {
  if (l.rows() != l.cols()) throw std::invalid_argument("operator must be square");
  const Eigen::VectorXd d = sqrt_mass(mass, l.rows());
  return d.asDiagonal() * l * d.cwiseInverse().asDiagonal();
}

}  // namespace

double check_semi_negative(const Eigen::MatrixXd& lh, const Eigen::VectorXd& mass) {
  if (lh.rows() > kMaxDenseEigen) {
    throw NumericalError("check_semi_negative: dense eigensolve limited to dimension 4096");
  }
  if (lh.size() == 0) return 0.0;
  const Eigen::MatrixXd ls = scaled(lh, mass);
  const Eigen::MatrixXd sym = 0.5 * (ls + ls.transpose());
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("check_semi_negative: eigensolver failed");
  return es.eigenvalues().maxCoeff();
}

const Eigen::Matrix4d& energy_coefficients() {
  static const Eigen::Matrix4d a = [] {
    Eigen::Matrix4d m;
    m << 1.0, 1.0 / 2.0, 1.0 / 6.0, 1.0 / 24.0,  //
        1.0 / 2.0, 1.0 / 3.0, 1.0 / 8.0, 1.0 / 24.0,  //
        1.0 / 6.0, 1.0 / 8.0, 1.0 / 24.0, 1.0 / 48.0,  //
        1.0 / 24.0, 1.0 / 24.0, 1.0 / 48.0, 1.0 / 144.0;
    return Eigen::Matrix4d(-m);
  }();
  return a;
}

EnergyReport energy_change(const Eigen::VectorXd& u, const Eigen::MatrixXd& lh, double tau,
                           const Eigen::VectorXd& mass) {
  if (lh.rows() != u.size()) throw std::invalid_argument("energy_change: dimension mismatch");
  const Eigen::MatrixXd l = tau * scaled(lh, mass);
  const Eigen::VectorXd d = sqrt_mass(mass, u.size());

  std::array<Eigen::VectorXd, 5> v;
  v[0] = d.cwiseProduct(u);
  for (int i = 1; i < 5; ++i) v[i] = l * v[i - 1];
  const Eigen::VectorXd after = v[0] + v[1] + v[2] / 2.0 + v[3] / 6.0 + v[4] / 24.0;

  EnergyReport r;
  r.norm_sq_before = v[0].squaredNorm();
  r.norm_sq_after = after.squaredNorm();
  r.direct_change = r.norm_sq_after - r.norm_sq_before;
  r.dissipation_part = v[4].squaredNorm() / 576.0 - v[3].squaredNorm() / 72.0;

  const Eigen::Matrix4d& alpha = energy_coefficients();
  const Eigen::MatrixXd sym = l + l.transpose();
  double quad = 0.0;
  for (int j = 0; j < 4; ++j) {
    const Eigen::VectorXd sv = sym * v[j];
    for (int i = 0; i < 4; ++i) quad -= alpha(i, j) * v[i].dot(sv);
  }
  r.quadratic_part = quad;
  r.q_value = r.dissipation_part + r.quadratic_part;
  return r;
}

// ---------------------------------------------------------------------------
// Rational arithmetic

Rational::Rational(long long num, long long den) {
  if (den == 0) throw std::invalid_argument("Rational: zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const long long g = std::gcd(num, den);
  num_ = g ? num / g : 0;
  den_ = g ? den / g : 1;
}

std::string Rational::str() const {
  return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
}

Rational operator+(const Rational& a, const Rational& b) {
  const long long g = std::gcd(a.den_, b.den_);
  return Rational(a.num_ * (b.den_ / g) + b.num_ * (a.den_ / g), a.den_ / g * b.den_);
}

Rational operator-(const Rational& a) { return Rational(-a.num_, a.den_); }
Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }

Rational operator*(const Rational& a, const Rational& b) {
  // Cross-reduce first to keep intermediates small.
  const long long g1 = std::gcd(a.num_, b.den_);
  const long long g2 = std::gcd(b.num_, a.den_);
  const long long n1 = g1 ? a.num_ / g1 : 0;
  const long long d2 = g1 ? b.den_ / g1 : b.den_;
  const long long n2 = g2 ? b.num_ / g2 : 0;
  const long long d1 = g2 ? a.den_ / g2 : a.den_;
  return Rational(n1 * n2, d1 * d2);
}

Eigen::MatrixXd to_dense(const RationalMatrix<3, 3>& m) {
  Eigen::MatrixXd d(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) d(i, j) = m[i][j].to_double();
  return d;
}

RationalMatrix<3, 3> operator+(const RationalMatrix<3, 3>& a, const RationalMatrix<3, 3>& b) {
  RationalMatrix<3, 3> c;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) c[i][j] = a[i][j] + b[i][j];
  return c;
}

namespace {

using RationalGrid = std::vector<std::vector<Rational>>;

RationalMatrix<3, 3> negated(const std::array<std::array<long long, 6>, 3>& entries) {
  // entries as (num, den) pairs per row.
  RationalMatrix<3, 3> m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m[i][j] = -Rational(entries[i][2 * j], entries[i][2 * j + 1]);
  return m;
}

Eigen::Vector3d symmetric_eigenvalues(const RationalMatrix<3, 3>& m) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_dense(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

RationalGrid energy_coefficients_exact() {
  const long long den[4][4] = {{1, 2, 6, 24}, {2, 3, 8, 24}, {6, 8, 24, 48}, {24, 24, 48, 144}};
  RationalGrid g(4, std::vector<Rational>(4));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) g[i][j] = Rational(-1, den[i][j]);
  return g;
}

// alpha'_ij = sum alpha_ab p_c p_d over a + c = i, b + d = j, with P4 coefficients p.
RationalGrid compose_with_p4(const RationalGrid& a) {
  const std::array<Rational, 5> p{Rational(1), Rational(1), Rational(1, 2), Rational(1, 6), Rational(1, 24)};
  const std::size_t n = a.size() + 4;
  RationalGrid out(n, std::vector<Rational>(n));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j)
      for (std::size_t c = 0; c < 5; ++c)
        for (std::size_t d = 0; d < 5; ++d) out[i + c][j + d] = out[i + c][j + d] + a[i][j] * p[c] * p[d];
  return out;
}

RationalMatrix<3, 3> leading_block(const RationalGrid& g) {
  RationalMatrix<3, 3> m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m[i][j] = g[i][j];
  return m;
}

}  // namespace

CompositeMatrices build_composite_matrices() {
  CompositeMatrices c;
  c.a0 = negated({{{1, 1, 1, 2, 1, 6}, {1, 2, 1, 3, 1, 8}, {1, 6, 1, 8, 1, 24}}});
  c.a1 = negated({{{1, 1, 3, 2, 7, 6}, {3, 2, 7, 3, 15, 8}, {7, 6, 15, 8, 37, 24}}});
  c.a2 = negated({{{1, 1, 5, 2, 19, 6}, {5, 2, 19, 3, 57, 8}, {19, 6, 57, 8, 253, 24}}});
  c.a = negated({{{3, 1, 9, 2, 9, 2}, {9, 2, 9, 1, 73, 8}, {9, 2, 73, 8, 97, 8}}});
  c.eigenvalues = symmetric_eigenvalues(c.a);
  return c;
}

CompositeMatrices derive_composite_matrices() {
  const RationalGrid alpha = energy_coefficients_exact();
  const RationalGrid one = compose_with_p4(alpha);
  const RationalGrid two = compose_with_p4(one);
  CompositeMatrices c;
  c.a0 = leading_block(alpha);
  c.a1 = leading_block(one);
  c.a2 = leading_block(two);
  c.a = c.a0 + c.a1 + c.a2;
  c.eigenvalues = symmetric_eigenvalues(c.a);
  return c;
}

// ---------------------------------------------------------------------------
// Norms and multistep trials

double operator_norm(const Eigen::MatrixXd& l) {
  if (l.rows() != l.cols()) throw std::invalid_argument("operator_norm: matrix must be square");
  const NormEstimate est = estimate_spectral_norm([&](const Eigen::VectorXd& v) { return Eigen::VectorXd(l * v); },
                                                  [&](const Eigen::VectorXd& v) {
                                                    return Eigen::VectorXd(l.transpose() * v);
                                                  },
                                                  l.rows());
  if (!est.converged) {
    throw NumericalError("operator_norm: power iteration did not converge in " + std::to_string(est.iterations) +
                         " iterations; last estimate " + std::to_string(est.value));
  }
  return est.value;
}

double operator_norm(const OperatorSet& ops) {
  const Eigen::VectorXd d = ops.mass().cwiseSqrt();
  const Eigen::VectorXd di = d.cwiseInverse();
  const NormEstimate est = estimate_spectral_norm(
      [&](const Eigen::VectorXd& v) { return Eigen::VectorXd(d.cwiseProduct(ops.apply_lh(di.cwiseProduct(v)))); },
      [&](const Eigen::VectorXd& v) {
        return Eigen::VectorXd(di.cwiseProduct(ops.apply_lh_transpose(d.cwiseProduct(v))));
      },
      ops.dofs());
  if (!est.converged) {
    throw NumericalError("operator_norm: power iteration did not converge; last estimate " +
                         std::to_string(est.value));
  }
  return est.value;
}

Eigen::MatrixXd rk4_polynomial(const Eigen::MatrixXd& l, double tau) {
  const Eigen::Index n = l.rows();
  const Eigen::MatrixXd t = tau * l;
  // Horner: I + t (I + t/2 (I + t/3 (I + t/4))).
  Eigen::MatrixXd p = Eigen::MatrixXd::Identity(n, n) + t / 4.0;
  p = Eigen::MatrixXd::Identity(n, n) + (t * p) / 3.0;
  p = Eigen::MatrixXd::Identity(n, n) + (t * p) / 2.0;
  p = Eigen::MatrixXd::Identity(n, n) + t * p;
  return p;
}

namespace {

void check_guard(const Eigen::MatrixXd& ls, double tau, double c0) {
  const double c = tau * operator_norm(ls);
  // The relative slack covers the power-iteration tolerance.
  if (c > c0 * (1.0 + 1e-5)) {
    throw ConfigError("multistep stability: tau |L| = " + std::to_string(c) + " exceeds c0 = " +
                                std::to_string(c0));
  }
}

Eigen::MatrixXd unit_trials(Eigen::Index dim, int trials, std::uint64_t seed) {
  Eigen::MatrixXd u(dim, trials);
  for (int t = 0; t < trials; ++t) {
    Eigen::VectorXd v = normal_vector(dim, seed + static_cast<std::uint64_t>(t));
    u.col(t) = v / v.norm();
  }
  return u;
}

MultistepScan scan_scaled(const Eigen::MatrixXd& ls, double tau, int horizon, int trials, std::uint64_t seed) {
  const Eigen::MatrixXd p = rk4_polynomial(ls, tau);
  std::vector<Eigen::VectorXd> norms;  // norms[n](t) = |u^n| for trial t
  Eigen::MatrixXd u = unit_trials(ls.rows(), trials, seed);
  norms.push_back(u.colwise().norm().transpose());
  for (int n = 1; n <= horizon; ++n) {
    u = p * u;
    norms.push_back(u.colwise().norm().transpose());
  }
  MultistepScan s;
  auto worst = [&](int step) {
    double w = 0.0;
    for (int n = 0; n + step <= horizon; ++n)
      for (int t = 0; t < trials; ++t)
        if (norms[n][t] > 0.0) w = std::max(w, norms[n + step][t] / norms[n][t]);
    return w;
  };
  s.worst_one_step = worst(1);
  s.worst_two_step = worst(2);
  s.worst_three_step = worst(3);
  return s;
}

}  // namespace

double multistep_stability_trial(const Eigen::MatrixXd& lh, double tau, int steps, int trials, std::uint64_t seed,
                                 const Eigen::VectorXd& mass, double c0) {
  if (steps != 2 && steps != 3) throw std::invalid_argument("multistep_stability_trial: steps must be 2 or 3");
  if (trials < 1) throw std::invalid_argument("multistep_stability_trial: trials must be positive");
  const Eigen::MatrixXd ls = scaled(lh, mass);
  check_guard(ls, tau, c0);
  Eigen::MatrixXd p = rk4_polynomial(ls, tau);
  const Eigen::MatrixXd u0 = unit_trials(ls.rows(), trials, seed);
  Eigen::MatrixXd u = u0;
  for (int s = 0; s < steps; ++s) u = p * u;
  return u.colwise().norm().maxCoeff();
}

MultistepScan multistep_stability_scan(const Eigen::MatrixXd& lh, double tau, int horizon, int trials,
                                       std::uint64_t seed, const Eigen::VectorXd& mass, double c0) {
  if (horizon < 3) throw std::invalid_argument("multistep_stability_scan: horizon must be at least 3");
  if (trials < 1) throw std::invalid_argument("multistep_stability_scan: trials must be positive");
  const Eigen::MatrixXd ls = scaled(lh, mass);
  check_guard(ls, tau, c0);
  return scan_scaled(ls, tau, horizon, trials, seed);
}

double empirical_stability_boundary(const Eigen::MatrixXd& lh, int steps, int horizon, int trials, std::uint64_t seed,
                                    const Eigen::VectorXd& mass, double c_max, int bisections) {
  if (steps < 1 || steps > 3) throw std::invalid_argument("empirical_stability_boundary: steps must be 1, 2 or 3");
  const Eigen::MatrixXd ls = scaled(lh, mass);
  const double norm = operator_norm(ls);
  if (norm == 0.0) return c_max;
  auto stable = [&](double c) {
    const MultistepScan s = scan_scaled(ls, c / norm, horizon, trials, seed);
    const double w = steps == 1 ? s.worst_one_step : (steps == 2 ? s.worst_two_step : s.worst_three_step);
    return w <= 1.0 + 1e-12;
  };
  if (stable(c_max)) return c_max;
  double lo = 0.0;
  double hi = c_max;
  for (int i = 0; i < bisections; ++i) {
    const double mid = 0.5 * (lo + hi);
    (stable(mid) ? lo : hi) = mid;
  }
  return lo;
}

StabilityReport stability_report(const OperatorSet& ops, const StabilityOptions& options) {
  if (ops.dofs() > kMaxDenseEigen) {
    throw ConfigError("stability report needs a dense operator; dimension limited to 4096");
  }
  StabilityReport r;
  r.seed = options.seed;
  const Eigen::MatrixXd lh = ops.Lh();
  const Eigen::VectorXd& mass = ops.mass();
  const Eigen::MatrixXd ls = scaled(lh, mass);
  r.operator_norm = operator_norm(ls);
  r.max_symmetric_eigenvalue = check_semi_negative(lh, mass);
  r.tau = options.tau_times_norm / r.operator_norm;
  r.scan = scan_scaled(ls, r.tau, options.horizon, options.trials, options.seed);
  for (int t = 0; t < options.energy_trials; ++t) {
    const Eigen::VectorXd u = normal_vector(ops.dofs(), options.seed + 1000003ULL + static_cast<std::uint64_t>(t));
    const EnergyReport e = energy_change(u, lh, r.tau, mass);
    r.energy_residual_max = std::max(r.energy_residual_max, std::abs(e.residual()) / e.norm_sq_before);
  }
  if (options.scan_boundary) {
    r.boundary_two_step = empirical_stability_boundary(lh, 2, options.horizon, options.trials, options.seed, mass);
    r.boundary_three_step = empirical_stability_boundary(lh, 3, options.horizon, options.trials, options.seed, mass);
  }
  return r;
}

}  // namespace boldg
