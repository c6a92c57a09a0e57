#pragma once

#include <filesystem>
#include <memory>
#include <vector>

#include "boldg/mesh.hpp"

namespace boldg {

/// Kernel realized by the discrete operator.
///  - line:     1 / (pi (x - y)) truncated to [a, b] (compactly supported data).
///  - periodic: the line kernel summed over all periodic images of [a, b], i.e.
///              (1 / P) cot(pi (x - y) / P) with P = b - a.
enum class HilbertKernel { line, periodic };

/// How cell pairs whose kernel is singular on or at the corner of the pair
/// (same cell and direct neighbours) are integrated.
///  - tensor_gauss:  outer/inner Gauss tensor rule for every pair. Distinct rules
///                   keep x != y at every node pair.
///  - semi_analytic: inner integral in closed form via Legendre functions of the
///                   second kind, outer integral on a geometrically graded rule.
///                   Far pairs still use the outer/inner tensor rule.
enum class NearFieldRule { tensor_gauss, semi_analytic };

struct HilbertOptions {
  int outer_points = 7;
  int inner_points = 8;
  bool skew = true;
  HilbertKernel kernel = HilbertKernel::line;
  NearFieldRule near_field = NearFieldRule::semi_analytic;
};

/// Discrete Hilbert transform in moment form: (K q)_{(i,l)} = (H q, phi_{i,l}).
///
/// On the uniform mesh K[(i,l),(j,m)] depends on i - j only, so the operator is
/// stored as one (k+1) x (k+1) block per cell offset and applied through FFT
/// convolution. dense() materializes the full matrix.
class HilbertOperator {
 public:
  HilbertOperator(SpacePtr space, HilbertKernel kernel, bool skewed, std::vector<Eigen::MatrixXd> blocks);
  ~HilbertOperator();
  HilbertOperator(HilbertOperator&&) noexcept;
  HilbertOperator& operator=(HilbertOperator&&) noexcept;

  const DGSpace& space() const noexcept { return *space_; }
  const SpacePtr& space_ptr() const noexcept { return space_; }
  bool skewed() const noexcept { return skewed_; }
  HilbertKernel kernel() const noexcept { return kernel_; }

  /// Block coupling cell i to cell j, offset d = i - j.
  const Eigen::MatrixXd& block(int offset) const;

  Eigen::MatrixXd dense() const;

  /// K q and K^T q on raw coefficient vectors.
  Eigen::VectorXd apply_moments(const Eigen::VectorXd& q) const;
  Eigen::VectorXd apply_transpose_moments(const Eigen::VectorXd& q) const;

  /// p = M^{-1} K q: the field with (p, w) = (H q, w) for all w in V^k.
  Field apply(const Field& q) const;

  /// Row-major dump of dense(): int64 N, int64 k, int64 flags
  /// (bit 0 skewed, bit 1 periodic kernel), then N(k+1) squared doubles.
  void write_dump(const std::filesystem::path& path) const;

 private:
  class Convolver;

  SpacePtr space_;
  HilbertKernel kernel_;
  bool skewed_;
  std::vector<Eigen::MatrixXd> blocks_;  // line: offsets -(N-1)..N-1; periodic: 0..N-1
  std::unique_ptr<Convolver> forward_;
  std::unique_ptr<Convolver> transpose_;
};

struct HilbertDump {
  long long cells = 0;
  long long degree = 0;
  long long flags = 0;
  Eigen::MatrixXd matrix;
};
HilbertDump read_hilbert_dump(const std::filesystem::path& path);

/// Assembles K. Requires outer_rule.n != inner_rule.n.
HilbertOperator assemble_hilbert(const SpacePtr& space, const QuadRule& outer_rule, const QuadRule& inner_rule,
                                 bool skew, HilbertKernel kernel = HilbertKernel::line,
                                 NearFieldRule near_field = NearFieldRule::semi_analytic);

HilbertOperator assemble_hilbert(const SpacePtr& space, const HilbertOptions& options);

/// Reference-cell integral R_d(l, m) = int int phi_l(xi) phi_m(eta) / (xi - eta + 2d)
/// for a pair of cells d apart, on the semi-analytic route. Exposed for testing.
Eigen::MatrixXd reference_pair_integral(int degree, int offset);

}  // namespace boldg
