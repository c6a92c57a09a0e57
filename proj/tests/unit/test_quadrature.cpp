#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <thread>
#include <vector>

#include "boldg/quadrature.hpp"

using boldg::gauss_legendre;

namespace {

double integrate_monomial(const boldg::QuadRule& r, int m) {
  double s = 0.0;
  for (int i = 0; i < r.n; ++i) s += r.weights[i] * std::pow(r.nodes[i], m);
  return s;
}

double exact_monomial(int m) { return m % 2 == 1 ? 0.0 : 2.0 / (m + 1); }

}  // namespace

TEST_CASE("one point rule is the midpoint rule") {
  const auto& r = gauss_legendre(1);
  REQUIRE(r.n == 1);
  CHECK(r.nodes[0] == 0.0);
  CHECK(r.weights[0] == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("two point rule") {
  const auto& r = gauss_legendre(2);
  CHECK(r.nodes[0] == doctest::Approx(-1.0 / std::sqrt(3.0)).epsilon(1e-15));
  CHECK(r.nodes[1] == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-15));
  CHECK(r.weights[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(r.weights[1] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("seven point rule integrates x^12 and x^13") {
  const auto& r = gauss_legendre(7);
  CHECK(std::abs(integrate_monomial(r, 13)) <= 1e-13);
  CHECK(std::abs(integrate_monomial(r, 12) - 2.0 / 13.0) <= 1e-13);
}

TEST_CASE("rules 1..20 are exact to degree 2n-1") {
  for (int n = 1; n <= 20; ++n) {
    const auto& r = gauss_legendre(n);
    for (int m = 0; m <= 2 * n - 1; ++m) {
      INFO("n = " << n << ", m = " << m);
      CHECK(std::abs(integrate_monomial(r, m) - exact_monomial(m)) <= 1e-12);
    }
  }
}

TEST_CASE("structural invariants up to 64 points") {
  for (int n = 1; n <= boldg::kMaxGaussPoints; ++n) {
    const auto& r = gauss_legendre(n);
    INFO("n = " << n);
    REQUIRE(static_cast<int>(r.nodes.size()) == n);
    CHECK(std::abs(std::accumulate(r.weights.begin(), r.weights.end(), 0.0) - 2.0) <= 1e-14);
    for (int i = 0; i < n; ++i) {
      CHECK(r.weights[i] > 0.0);
      CHECK(std::abs(r.nodes[i] + r.nodes[n - 1 - i]) <= 1e-15);
      // Beyond n = 20 the residual floor is |P_n'| times the node rounding.
      const auto p = boldg::legendre_polynomial(n, r.nodes[i]);
      const double floor = n <= 20 ? 0.0 : 4.0 * std::numeric_limits<double>::epsilon() * std::abs(p.derivative);
      CHECK(std::abs(p.value) <= 1e-14 + floor);
      if (i > 0) CHECK(r.nodes[i] > r.nodes[i - 1]);
    }
  }
}

TEST_CASE("invalid point counts are rejected") {
  CHECK_THROWS_AS(gauss_legendre(0), std::invalid_argument);
  CHECK_THROWS_AS(gauss_legendre(65), std::invalid_argument);
}

TEST_CASE("cache is safe under concurrent first access") {
  std::vector<const boldg::QuadRule*> seen(4, nullptr);
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t)
    threads.emplace_back([&seen, t] { seen[t] = &gauss_legendre(33); });
  for (auto& th : threads) th.join();
  for (int t = 1; t < 4; ++t) CHECK(seen[t] == seen[0]);
}
