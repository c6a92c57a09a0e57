#include <doctest.h>

#include <cmath>
#include <random>

#include "boldg/mesh.hpp"

using namespace boldg;

TEST_CASE("uniform split of the unit interval") {
  const Mesh m = build_mesh(0.0, 1.0, 4);
  const std::vector<double> expected{0.0, 0.25, 0.5, 0.75, 1.0};
  REQUIRE(m.edges().size() == expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) CHECK(m.edges()[i] == doctest::Approx(expected[i]).epsilon(1e-15));
}

TEST_CASE("160 cells on [-15, 15]") {
  const Mesh m = build_mesh(-15.0, 15.0, 160);
  CHECK(m.cells() == 160);
  double total = 0.0;
  for (double w : m.widths()) {
    CHECK(w == doctest::Approx(0.1875).epsilon(1e-13));
    total += w;
  }
  CHECK(std::abs(total - 30.0) <= 30.0 * 1e-13);
  CHECK(m.edges().front() == -15.0);
  CHECK(m.edges().back() == 15.0);
}

TEST_CASE("degenerate meshes are rejected") {
  CHECK_THROWS_AS(build_mesh(0.0, 1.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(build_mesh(1.0, 1.0, 4), std::invalid_argument);
  CHECK_THROWS_AS(build_mesh(2.0, 1.0, 4), std::invalid_argument);
}

TEST_CASE("basis values") {
  const SpacePtr space = make_space(build_mesh(0.0, 1.0, 2), 3);
  for (double x : {-1.0, -0.3, 0.0, 0.7, 1.0}) {
    const BasisValues b = eval_basis(*space, x);
    CHECK(b.values[0] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  }
  CHECK(eval_basis(*space, 0.0).values[1] == 0.0);
  CHECK_THROWS_AS(eval_basis(*space, 1.5), std::out_of_range);

  const auto& rule = gauss_legendre(8);
  double s = 0.0;
  for (int q = 0; q < rule.n; ++q) {
    const double v = eval_basis(*space, rule.nodes[q]).values[2];
    s += rule.weights[q] * v * v;
  }
  CHECK(std::abs(s - 1.0) <= 1e-14);
}

TEST_CASE("basis derivatives match central differences") {
  const SpacePtr space = make_space(build_mesh(0.0, 1.0, 1), 4);
  const double x = 0.37;
  const double eps = 1e-6;
  const BasisValues b = eval_basis(*space, x, 1);
  const BasisValues up = eval_basis(*space, x + eps);
  const BasisValues dn = eval_basis(*space, x - eps);
  for (int m = 0; m <= 4; ++m) CHECK(b.derivatives[m] == doctest::Approx((up.values[m] - dn.values[m]) / (2 * eps)).epsilon(1e-7));
}

TEST_CASE("per-cell mass matrix is (h/2) I") {
  const SpacePtr space = make_space(build_mesh(-1.0, 2.0, 3), 3);
  const auto& rule = gauss_legendre(6);
  const double h = 1.0;
  for (int l = 0; l <= 3; ++l) {
    for (int m = 0; m <= 3; ++m) {
      double s = 0.0;
      for (int q = 0; q < rule.n; ++q) {
        const BasisValues b = eval_basis(*space, rule.nodes[q]);
        s += rule.weights[q] * b.values[l] * b.values[m] * h / 2;
      }
      CHECK(std::abs(s - (l == m ? h / 2 : 0.0)) <= 1e-13);
    }
  }
  CHECK(space->mass_diagonal().isApproxToConstant(0.5, 1e-15));
}

TEST_CASE("field evaluation") {
  const SpacePtr space = make_space(build_mesh(0.0, 2.0, 2), 1);

  SUBCASE("constant field") {
    Field u(space);
    for (int i = 0; i < 2; ++i) u.cell(i)(0) = 3.0 * std::sqrt(2.0);
    for (double x : {0.0, 0.5, 1.0, 1.7, 2.0}) {
      CHECK(eval_field(u, x, Side::left_limit) == doctest::Approx(3.0));
      CHECK(eval_field(u, x, Side::right_limit) == doctest::Approx(3.0));
    }
  }

  SUBCASE("zeroed cell") {
    Field u(space);
    u.cell(1) << 1.0, 2.0;
    CHECK(eval_field(u, 0.25) == 0.0);
    CHECK(eval_field(u, 0.75) == 0.0);
  }

  SUBCASE("hand-built jump") {
    // cell 0: u = 1 + (x - 0.5), cell 1: u = 4 - 2 (x - 1.5); u- = 1.5, u+ = 5
    Field u(space);
    const double c0 = std::sqrt(2.0);
    const double c1 = std::sqrt(2.0 / 3.0);
    u.cell(0) << 1.0 * c0, 0.5 * c1;
    u.cell(1) << 4.0 * c0, -1.0 * c1;
    CHECK(eval_field(u, 1.0, Side::left_limit) == doctest::Approx(1.5));
    CHECK(eval_field(u, 1.0, Side::right_limit) == doctest::Approx(5.0));
    CHECK(interior_jump(u, 0) == doctest::Approx(3.5));
  }

  CHECK_THROWS(eval_field(Field(space), 2.5));
}

TEST_CASE("norm and linearity properties on random fields") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  const SpacePtr space = make_space(build_mesh(-3.0, 4.0, 9), 3);
  for (int trial = 0; trial < 20; ++trial) {
    Field u(space), v(space);
    for (auto& c : u.coeffs()) c = normal(rng);
    for (auto& c : v.coeffs()) c = normal(rng);
    CHECK(std::abs(u.l2_norm() - u.l2_norm_quadrature(8)) <= 1e-12 * u.l2_norm());

    const double a = normal(rng), b = normal(rng);
    const Field w(space, a * u.coeffs() + b * v.coeffs());
    for (double x : {-3.0, -1.1, 0.0, 2.5, 4.0}) {
      const double lhs = eval_field(w, x);
      const double rhs = a * eval_field(u, x) + b * eval_field(v, x);
      CHECK(std::abs(lhs - rhs) <= 1e-13 * (1.0 + std::abs(lhs)));
    }
  }
}
