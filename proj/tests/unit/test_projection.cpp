#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "boldg/projection.hpp"
#include "oracles.hpp"

using namespace boldg;
using boldg::testing::l2_distance;
using boldg::testing::observed_rate;

namespace {

const double pi = std::numbers::pi;

double sin_pi(double x) { return std::sin(pi * x); }

}  // namespace

TEST_CASE("polynomials of degree k are reproduced") {
  for (int k = 1; k <= 3; ++k) {
    const SpacePtr space = make_space(build_mesh(-1.0, 2.0, 5), k);
    const auto g = [k](double x) { return 0.3 - x + 0.7 * std::pow(x, k); };
    CHECK(l2_distance(l2_project(g, space), g) <= 1e-12);
    CHECK(l2_distance(radau_project(g, space), g) <= 1e-12);
  }
}

TEST_CASE("zero maps to zero") {
  const SpacePtr space = make_space(build_mesh(0.0, 1.0, 4), 2);
  const auto zero = [](double) { return 0.0; };
  CHECK(l2_project(zero, space).coeffs().isZero(0.0));
  CHECK(radau_project(zero, space).coeffs().isZero(0.0));
}

TEST_CASE("degree zero spaces are rejected") {
  CHECK_THROWS_AS(make_space(build_mesh(0.0, 1.0, 4), 0), std::invalid_argument);
}

TEST_CASE("right-endpoint condition is exact") {
  for (int k = 1; k <= 3; ++k) {
    const SpacePtr space = make_space(build_mesh(-1.0, 1.0, 7), k);
    const Field u = radau_project(sin_pi, space);
    const auto edges = space->mesh().edges();
    for (int i = 0; i < space->cells(); ++i) {
      CHECK(std::abs(eval_field(u, edges[i + 1], Side::left_limit) - sin_pi(edges[i + 1])) <= 1e-12);
    }
  }
}

TEST_CASE("moments up to degree k-1 are matched") {
  const auto moment_defects = [](const SpacePtr& space, const std::function<double(double)>& g) {
    const Field u = radau_project(g, space);
    const auto& rule = gauss_legendre(20);
    const Mesh& mesh = space->mesh();
    double worst = 0.0;
    for (int i = 0; i < mesh.cells(); ++i) {
      for (int m = 0; m < space->degree(); ++m) {
        double s = 0.0;
        for (int q = 0; q < rule.n; ++q) {
          const double xi = rule.nodes[q];
          s += rule.weights[q] * (u.value_in_cell(i, xi) - g(mesh.to_physical(i, xi))) *
               eval_basis(*space, xi).values[m];
        }
        worst = std::max(worst, std::abs(s));
      }
    }
    return worst;
  };

  SUBCASE("random polynomials, exact under the space quadrature") {
    std::mt19937_64 rng(13);
    std::normal_distribution<double> normal;
    for (int k = 1; k <= 3; ++k) {
      const SpacePtr space = make_space(build_mesh(-2.0, 1.0, 6), k);
      for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> c(k + 4);
        for (double& x : c) x = normal(rng);
        const auto g = [c](double x) {
          double s = 0.0;
          for (auto it = c.rbegin(); it != c.rend(); ++it) s = s * x + *it;
          return s;
        };
        CHECK(moment_defects(space, g) <= 1e-12);
      }
    }
  }

  SUBCASE("smooth function with a fine volume rule") {
    const SpacePtr space = make_space(build_mesh(-2.0, 1.0, 6), 3, 20);
    CHECK(moment_defects(space, [](double x) { return std::exp(0.5 * x) * std::cos(3.0 * x); }) <= 1e-12);
  }
}

TEST_CASE("projections are idempotent") {
  for (int k = 1; k <= 3; ++k) {
    const SpacePtr space = make_space(build_mesh(-1.0, 1.0, 8), k);
    const Field p = l2_project(sin_pi, space);
    const Field pp = l2_project([&](double x) { return eval_field(p, x, Side::left_limit); }, space);
    CHECK((pp.coeffs() - p.coeffs()).lpNorm<Eigen::Infinity>() <= 1e-13);

    const Field r = radau_project(sin_pi, space);
    const Field rr = radau_project([&](double x) { return eval_field(r, x, Side::left_limit); }, space);
    CHECK((rr.coeffs() - r.coeffs()).lpNorm<Eigen::Infinity>() <= 1e-13);
  }
}

TEST_CASE("refinement rates on sin(pi x)") {
  const auto rate = [](int k, bool radau) {
    double errors[2];
    const int cells[2] = {16, 32};
    for (int j = 0; j < 2; ++j) {
      const SpacePtr space = make_space(build_mesh(-1.0, 1.0, cells[j]), k);
      errors[j] = l2_distance(radau ? radau_project(sin_pi, space) : l2_project(sin_pi, space), sin_pi);
    }
    return observed_rate(errors[0], errors[1], cells[0], cells[1]);
  };
  CHECK(std::abs(rate(2, false) - 3.0) <= 0.1);
  CHECK(std::abs(rate(1, true) - 2.0) <= 0.1);
}
