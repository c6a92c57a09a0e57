#include "boldg/linalg.hpp"

#include <cmath>
#include <random>

namespace boldg {

Eigen::VectorXd normal_vector(Eigen::Index dim, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  Eigen::VectorXd v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v[i] = dist(gen);
  return v;
}

NormEstimate estimate_spectral_norm(const LinearMap& apply, const LinearMap& apply_transpose, Eigen::Index dim,
                                    double rel_tol, int max_iter, std::uint64_t seed) {
  NormEstimate est;
  if (dim == 0) {
    est.converged = true;
    return est;
  }
  Eigen::VectorXd v = normal_vector(dim, seed);
  v.normalize();
  double previous = -1.0;
  for (int it = 1; it <= max_iter; ++it) {
    const Eigen::VectorXd lv = apply(v);
    est.value = lv.norm();  // Rayleigh quotient of L^T L is |Lv|^2
    est.iterations = it;
    if (previous >= 0.0 && std::abs(est.value - previous) <= rel_tol * est.value) {
      est.converged = true;
      return est;
    }
    previous = est.value;
    Eigen::VectorXd w = apply_transpose(lv);
    const double nw = w.norm();
    if (nw == 0.0) {
      est.converged = true;
      return est;
    }
    v = w / nw;
  }
  return est;
}

}  // namespace boldg
