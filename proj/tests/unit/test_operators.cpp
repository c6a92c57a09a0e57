#include <doctest.h>

#include <cmath>
#include <random>

#include "boldg/errors.hpp"
#include "boldg/operators.hpp"
#include "boldg/stability.hpp"

using namespace boldg;

namespace {

Eigen::VectorXd random_vector(Eigen::Index n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Eigen::VectorXd v(n);
  for (auto& x : v) x = normal(rng);
  return v;
}

OperatorSet make_ops(double a, double b, int n, int k, FluxConfig flux) {
  const SpacePtr space = make_space(build_mesh(a, b, n), k);
  HilbertOptions opt;
  opt.kernel = flux.boundary == Boundary::periodic ? HilbertKernel::periodic : HilbertKernel::line;
  return assemble_operators(space, flux, std::make_shared<const HilbertOperator>(assemble_hilbert(space, opt)));
}

// Reflection x -> a + b - x on coefficients: cell i -> N-1-i, mode m -> (-1)^m.
Eigen::MatrixXd reflection(int n, int k) {
  const int modes = k + 1;
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(n * modes, n * modes);
  for (int i = 0; i < n; ++i)
    for (int m = 0; m < modes; ++m) r((n - 1 - i) * modes + m, i * modes + m) = (m % 2 == 0) ? 1.0 : -1.0;
  return r;
}

}  // namespace

TEST_CASE("Lax-Friedrichs flux values") {
  const FluxFunction burgers = FluxFunction::burgers();
  CHECK(lax_friedrichs(3.0, 3.0, burgers, 0.7) == 4.5);
  CHECK(lax_friedrichs(1.0, -1.0, burgers, 1.0) == doctest::Approx(1.5));
  const FluxFunction linear = FluxFunction::linear(1.0);
  for (double um : {-2.0, 0.3, 5.0})
    for (double up : {-1.0, 0.0, 4.0}) CHECK(lax_friedrichs(um, up, linear, 1.0) == doctest::Approx(um));
}

TEST_CASE("hand-assembled Dm for N = 2, k = 1") {
  FluxConfig flux;
  flux.boundary = Boundary::zero;
  const OperatorSet ops = make_ops(0.0, 2.0, 2, 1, flux);
  const double r3 = std::sqrt(3.0);
  Eigen::Matrix4d expected;
  expected << 0.5, r3 / 2, 0, 0,
              -r3 / 2, 1.5, 0, 0,
              -0.5, -r3 / 2, 0, 0,
              r3 / 2, 1.5, -r3, 0;
  const Eigen::MatrixXd dm = Eigen::MatrixXd(ops.Dm());
  CHECK((dm - expected).cwiseAbs().maxCoeff() <= 1e-14);

  // u = 1: the interior jump vanishes and u-hat = 0 at the ends leaves the trace
  // functionals q = phi(-1) in cell 0 and q = -phi(+1) in cell 1 (times 2/h).
  Eigen::VectorXd c(4);
  c << std::sqrt(2.0), 0, std::sqrt(2.0), 0;
  const Eigen::VectorXd q = ops.Minv().cwiseProduct(ops.Dm() * c);
  Eigen::Vector4d expected_q;
  expected_q << std::sqrt(2.0), -std::sqrt(6.0), -std::sqrt(2.0), -std::sqrt(6.0);
  CHECK((q - expected_q).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("adjoint identity Dp = -Dm^T") {
  for (Orientation o : {Orientation::p_plus_u_minus, Orientation::p_minus_u_plus}) {
    for (Boundary bc : {Boundary::zero, Boundary::periodic}) {
      for (int k : {1, 2, 3}) {
        FluxConfig flux;
        flux.orientation = o;
        flux.boundary = bc;
        const OperatorSet ops = make_ops(-1.0, 2.0, 9, k, flux);
        const Eigen::MatrixXd sum = Eigen::MatrixXd(ops.Dp()) + Eigen::MatrixXd(ops.Dm()).transpose();
        CHECK(sum.cwiseAbs().maxCoeff() <= 1e-13);
      }
    }
  }
}

TEST_CASE("orientation mirror") {
  for (Boundary bc : {Boundary::zero, Boundary::periodic}) {
    for (int k : {1, 2}) {
      FluxConfig plus;
      plus.boundary = bc;
      FluxConfig minus = plus;
      minus.orientation = Orientation::p_minus_u_plus;
      const int n = 6;
      const OperatorSet a = make_ops(-1.0, 1.0, n, k, plus);
      const OperatorSet b = make_ops(-1.0, 1.0, n, k, minus);
      const Eigen::MatrixXd r = reflection(n, k);
      const Eigen::MatrixXd mirrored = -r * Eigen::MatrixXd(a.Dm()) * r;
      CHECK((mirrored - Eigen::MatrixXd(b.Dm())).cwiseAbs().maxCoeff() <= 1e-12);
      // H anticommutes with the reflection, so Lh does too.
      CHECK((r * a.Lh() * r + b.Lh()).cwiseAbs().maxCoeff() <= 1e-12 * a.Lh().cwiseAbs().maxCoeff());
    }
  }
}

TEST_CASE("Lh is semi-negative in the mass inner product") {
  std::mt19937_64 rng(3);
  for (Boundary bc : {Boundary::zero, Boundary::periodic}) {
    FluxConfig flux;
    flux.boundary = bc;
    const OperatorSet ops = make_ops(-5.0, 5.0, 32, 1, flux);
    const Eigen::MatrixXd lh = ops.Lh();
    CHECK(check_semi_negative(lh, ops.mass()) <= 1e-10);
    for (int trial = 0; trial < 100; ++trial) {
      const Eigen::VectorXd u = random_vector(ops.dofs(), rng);
      CHECK(u.dot(ops.mass().cwiseProduct(ops.apply_lh(u))) <= 1e-10 * u.dot(ops.mass().cwiseProduct(u)));
    }
  }
}

TEST_CASE("matrix-free applications agree with the dense matrices") {
  std::mt19937_64 rng(9);
  FluxConfig flux;
  const OperatorSet ops = make_ops(-3.0, 3.0, 10, 2, flux);
  const Eigen::MatrixXd a = ops.linear_moment_matrix();
  const Eigen::MatrixXd lh = ops.Lh();
  const Eigen::VectorXd u = random_vector(ops.dofs(), rng);
  CHECK((ops.apply_linear_moments(u) - a * u).norm() <= 1e-12 * (a * u).norm());
  CHECK((ops.apply_linear_moments_transpose(u) - a.transpose() * u).norm() <= 1e-12 * (a.transpose() * u).norm());
  CHECK((ops.apply_lh(u) - lh * u).norm() <= 1e-12 * (lh * u).norm());
  CHECK((ops.apply_lh_transpose(u) - lh.transpose() * u).norm() <= 1e-12 * (lh.transpose() * u).norm());
}

TEST_CASE("nonlinear right-hand side") {
  std::mt19937_64 rng(21);
  FluxConfig flux;
  flux.boundary = Boundary::periodic;
  const OperatorSet ops = make_ops(-4.0, 4.0, 16, 2, flux);
  const Eigen::Index n = ops.dofs();

  SUBCASE("f = 0 reduces to Lh u and is linear") {
    const FluxFunction zero = FluxFunction::zero();
    const Eigen::VectorXd u = random_vector(n, rng);
    const Eigen::VectorXd v = random_vector(n, rng);
    const Eigen::VectorXd lu = ops.apply_lh(u);
    CHECK((nonlinear_rhs(u, ops, zero) - lu).norm() <= 1e-13 * lu.norm());
    const Eigen::VectorXd combo = nonlinear_rhs(2.0 * u - 3.0 * v, ops, zero);
    CHECK((combo - 2.0 * nonlinear_rhs(u, ops, zero) + 3.0 * nonlinear_rhs(v, ops, zero)).norm() <= 1e-12 * combo.norm());
  }

  SUBCASE("zero field") {
    CHECK(nonlinear_rhs(Eigen::VectorXd::Zero(n), ops, FluxFunction::burgers()).isZero(0.0));
  }

  SUBCASE("non-finite input is detected") {
    Eigen::VectorXd u = random_vector(n, rng);
    u(3) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(nonlinear_rhs(u, ops, FluxFunction::burgers()), NumericalError);
  }

  CHECK_THROWS_AS(nonlinear_moments(Eigen::VectorXd::Zero(n + 1), ops, FluxFunction::burgers()), std::invalid_argument);
}

TEST_CASE("monotone flux produces no energy") {
  std::mt19937_64 rng(17);
  for (Boundary bc : {Boundary::zero, Boundary::periodic}) {
    for (DeltaMode mode : {DeltaMode::local_max, DeltaMode::global_max}) {
      FluxConfig flux;
      flux.boundary = bc;
      flux.delta_mode = mode;
      const OperatorSet ops = make_ops(-2.0, 2.0, 12, 2, flux);
      for (int trial = 0; trial < 100; ++trial) {
        const Eigen::VectorXd u = random_vector(ops.dofs(), rng);
        const Eigen::VectorXd f = nonlinear_moments(u, ops, FluxFunction::burgers());
        CHECK(u.dot(f) <= 1e-12 * std::pow(u.norm(), 3));
      }
    }
  }
}

TEST_CASE("single-cell bump loses energy through the flux") {
  FluxConfig flux;
  const OperatorSet ops = make_ops(-2.0, 2.0, 8, 1, flux);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(ops.dofs());
  u(2 * 3) = 1.0;
  CHECK(u.dot(nonlinear_moments(u, ops, FluxFunction::burgers())) < 0.0);
}

TEST_CASE("nonlinear Jacobian matches finite differences") {
  std::mt19937_64 rng(29);
  for (Boundary bc : {Boundary::zero, Boundary::periodic}) {
    for (DeltaMode mode : {DeltaMode::local_max, DeltaMode::global_max}) {
      FluxConfig flux;
      flux.boundary = bc;
      flux.delta_mode = mode;
      const OperatorSet ops = make_ops(-2.0, 2.0, 6, 2, flux);
      const FluxFunction f = FluxFunction::burgers();
      const Eigen::VectorXd u = random_vector(ops.dofs(), rng);
      const Eigen::MatrixXd jac = Eigen::MatrixXd(nonlinear_jacobian(u, ops, f));
      const double eps = 1e-6;
      Eigen::MatrixXd fd(ops.dofs(), ops.dofs());
      for (Eigen::Index j = 0; j < ops.dofs(); ++j) {
        Eigen::VectorXd up = u, dn = u;
        up(j) += eps;
        dn(j) -= eps;
        fd.col(j) = (nonlinear_moments(up, ops, f) - nonlinear_moments(dn, ops, f)) / (2 * eps);
      }
      CHECK((jac - fd).cwiseAbs().maxCoeff() <= 1e-6 * (1.0 + jac.cwiseAbs().maxCoeff()));
    }
  }
}
