#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <functional>
#include <memory>
#include <string>

#include "boldg/hilbert.hpp"
#include "boldg/mesh.hpp"

namespace boldg {

/// Alternating-flux pairing at interior edges.
///  - p_plus_u_minus: p-hat = p+, u-hat = u-
///  - p_minus_u_plus: p-hat = p-, u-hat = u+
enum class Orientation { p_plus_u_minus, p_minus_u_plus };
enum class NonlinearFlux { lax_friedrichs, none };
/// Range over which delta = max |f'(u)| is taken: every value in the domain, or
/// the two cells adjacent to each edge.
enum class DeltaMode { global_max, local_max };
/// Closure at x = a and x = b.
///  - zero:     exterior traces are 0 (compactly supported solutions)
///  - periodic: the first and last cells share an edge
enum class Boundary { zero, periodic };

struct FluxConfig {
  Orientation orientation = Orientation::p_plus_u_minus;
  NonlinearFlux nonlinear = NonlinearFlux::lax_friedrichs;
  DeltaMode delta_mode = DeltaMode::local_max;
  Boundary boundary = Boundary::zero;
};

/// Scalar flux f with its first two derivatives (the second feeds the Newton Jacobian).
struct FluxFunction {
  std::string name;
  std::function<double(double)> f;
  std::function<double(double)> df;
  std::function<double(double)> d2f;

  static FluxFunction burgers();            // u^2 / 2
  static FluxFunction linear(double speed);  // a u
  static FluxFunction zero();
};

/// 1/2 (f(u-) + f(u+)) - delta/2 (u+ - u-).
double lax_friedrichs(double u_minus, double u_plus, const FluxFunction& f, double delta);

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Discrete operators on one space, all in moment form (rows are test functions).
///  - Dm: u -> moments of D-(u, .), so q = Minv Dm u
///  - Dp: p -> moments of D+(p, .)
///  - A  = Dp Minv K Minv Dm, the linear part of the moment right-hand side
///  - Lh = Minv A, the semi-discrete evolution operator for f = 0
class OperatorSet {
 public:
  OperatorSet(SpacePtr space, FluxConfig flux, std::shared_ptr<const HilbertOperator> hilbert);

  const DGSpace& space() const noexcept { return *space_; }
  const SpacePtr& space_ptr() const noexcept { return space_; }
  const FluxConfig& flux() const noexcept { return flux_; }
  const HilbertOperator& hilbert() const noexcept { return *hilbert_; }
  const std::shared_ptr<const HilbertOperator>& hilbert_ptr() const noexcept { return hilbert_; }

  const SparseMatrix& Dp() const noexcept { return dp_; }
  const SparseMatrix& Dm() const noexcept { return dm_; }
  const Eigen::VectorXd& mass() const noexcept { return mass_; }
  const Eigen::VectorXd& Minv() const noexcept { return minv_; }
  int dofs() const noexcept { return space_->dofs(); }

  /// A u and A^T v without forming A.
  Eigen::VectorXd apply_linear_moments(const Eigen::VectorXd& u) const;
  Eigen::VectorXd apply_linear_moments_transpose(const Eigen::VectorXd& v) const;
  /// Lh u and Lh^T v without forming Lh.
  Eigen::VectorXd apply_lh(const Eigen::VectorXd& u) const;
  Eigen::VectorXd apply_lh_transpose(const Eigen::VectorXd& v) const;

  /// Dense A and Lh (O(dofs^2) memory).
  Eigen::MatrixXd linear_moment_matrix() const;
  Eigen::MatrixXd Lh() const;

 private:
  SpacePtr space_;
  FluxConfig flux_;
  std::shared_ptr<const HilbertOperator> hilbert_;
  SparseMatrix dp_;
  SparseMatrix dm_;
  Eigen::VectorXd mass_;
  Eigen::VectorXd minv_;
};

/// Builds Dp, Dm for the given flux configuration. The Hilbert operator must be
/// defined on a compatible space.
OperatorSet assemble_operators(const SpacePtr& space, const FluxConfig& flux,
                               std::shared_ptr<const HilbertOperator> hilbert);

/// Moments of F(f(u), .): volume term (f(u), v_x) plus f-hat [v] at every edge.
/// Returns zeros when flux.nonlinear is none.
Eigen::VectorXd nonlinear_moments(const Eigen::VectorXd& u, const OperatorSet& ops, const FluxFunction& f);

/// d/du of nonlinear_moments, including the dependence of a local delta on u.
SparseMatrix nonlinear_jacobian(const Eigen::VectorXd& u, const OperatorSet& ops, const FluxFunction& f);

/// du/dt = Minv (F(f(u), .) + A u). Throws NumericalError on non-finite input or output.
Eigen::VectorXd nonlinear_rhs(const Eigen::VectorXd& u, const OperatorSet& ops, const FluxFunction& f);

/// Throws NumericalError naming `what` if v holds NaN or Inf.
void require_finite(const Eigen::VectorXd& v, const std::string& what);

}  // namespace boldg
