#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>

namespace boldg {

using LinearMap = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct NormEstimate {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Spectral norm of a linear map by power iteration on L^T L, starting from a
/// seeded normal vector. Stops when successive estimates agree to rel_tol.
NormEstimate estimate_spectral_norm(const LinearMap& apply, const LinearMap& apply_transpose, Eigen::Index dim,
                                    double rel_tol = 1e-6, int max_iter = 10000, std::uint64_t seed = 1);

/// Seeded standard normal vector.
Eigen::VectorXd normal_vector(Eigen::Index dim, std::uint64_t seed);

}  // namespace boldg
