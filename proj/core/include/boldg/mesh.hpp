#pragma once

#include <Eigen/Dense>

#include <memory>
#include <span>
#include <vector>

#include "boldg/quadrature.hpp"

namespace boldg {

/// Which one-sided limit to take when a point sits on a cell edge.
enum class Side { left_limit, right_limit };

/// Uniform partition of [a, b] into N cells.
class Mesh {
 public:
  Mesh(double a, double b, int cells);

  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  int cells() const noexcept { return static_cast<int>(widths_.size()); }
  double length() const noexcept { return b_ - a_; }

  std::span<const double> edges() const noexcept { return edges_; }
  std::span<const double> widths() const noexcept { return widths_; }
  double width(int cell) const { return widths_.at(cell); }
  /// Largest cell width (all widths are equal for the uniform partition).
  double h() const noexcept { return h_; }
  double center(int cell) const { return 0.5 * (edges_.at(cell) + edges_.at(cell + 1)); }

  /// Cell owning x. On an interior edge the side selects the cell to the left
  /// (left_limit) or to the right (right_limit). Throws for x outside [a, b].
  int locate(double x, Side side) const;

  double to_reference(int cell, double x) const;
  double to_physical(int cell, double xi) const;

  bool operator==(const Mesh& other) const = default;

 private:
  double a_;
  double b_;
  double h_;
  std::vector<double> edges_;
  std::vector<double> widths_;
};

Mesh build_mesh(double a, double b, int cells);

/// Orthonormal Legendre values phi_m(xi) = sqrt(m + 1/2) P_m(xi), m = 0..degree,
/// and derivatives with respect to xi. Unlike eval_basis this accepts any real xi
/// (the polynomials are needed outside the reference cell by the Hilbert assembly).
void legendre_basis(int degree, double xi, std::span<double> values, std::span<double> derivatives = {});

struct BasisValues {
  Eigen::VectorXd values;
  Eigen::VectorXd derivatives;  // empty unless requested
};

/// Piecewise P^k space on a mesh, in the orthonormal Legendre modal basis.
/// Holds the reference-cell tables shared by projections and operator assembly.
class DGSpace {
 public:
  /// quad_order = 0 selects degree + 2 volume points.
  DGSpace(Mesh mesh, int degree, int quad_order = 0);

  const Mesh& mesh() const noexcept { return mesh_; }
  int degree() const noexcept { return degree_; }
  int modes() const noexcept { return degree_ + 1; }
  int cells() const noexcept { return mesh_.cells(); }
  int dofs() const noexcept { return cells() * modes(); }
  int quad_order() const noexcept { return quad_order_; }
  int index(int cell, int mode) const noexcept { return cell * modes() + mode; }

  const QuadRule& volume_rule() const noexcept { return *rule_; }
  /// (quad_order x modes) basis values and xi-derivatives at the volume nodes.
  const Eigen::MatrixXd& basis_at_nodes() const noexcept { return basis_nodes_; }
  const Eigen::MatrixXd& derivative_at_nodes() const noexcept { return deriv_nodes_; }
  /// phi_m(-1) and phi_m(+1).
  const Eigen::VectorXd& left_trace() const noexcept { return left_trace_; }
  const Eigen::VectorXd& right_trace() const noexcept { return right_trace_; }
  /// S(l, m) = int phi_l'(xi) phi_m(xi) dxi; also equals (p, v_x) on any cell.
  const Eigen::MatrixXd& stiffness() const noexcept { return stiffness_; }

  /// Diagonal of the global mass matrix, h_i / 2 per coefficient.
  Eigen::VectorXd mass_diagonal() const;
  Eigen::VectorXd inverse_mass_diagonal() const;

  /// Structural equality: same mesh, degree and quadrature order.
  bool compatible(const DGSpace& other) const;

 private:
  Mesh mesh_;
  int degree_;
  int quad_order_;
  const QuadRule* rule_;
  Eigen::MatrixXd basis_nodes_;
  Eigen::MatrixXd deriv_nodes_;
  Eigen::VectorXd left_trace_;
  Eigen::VectorXd right_trace_;
  Eigen::MatrixXd stiffness_;
};

using SpacePtr = std::shared_ptr<const DGSpace>;

SpacePtr make_space(Mesh mesh, int degree, int quad_order = 0);

/// Basis values at a reference coordinate |ref_x| <= 1; max_deriv is 0 or 1.
BasisValues eval_basis(const DGSpace& space, double ref_x, int max_deriv = 0);

/// A member of V^k: N x (k+1) modal coefficients stored cell-major.
class Field {
 public:
  explicit Field(SpacePtr space);
  Field(SpacePtr space, Eigen::VectorXd coeffs);

  const DGSpace& space() const noexcept { return *space_; }
  const SpacePtr& space_ptr() const noexcept { return space_; }

  Eigen::VectorXd& coeffs() noexcept { return coeffs_; }
  const Eigen::VectorXd& coeffs() const noexcept { return coeffs_; }

  auto cell(int i) { return coeffs_.segment(i * space_->modes(), space_->modes()); }
  auto cell(int i) const { return coeffs_.segment(i * space_->modes(), space_->modes()); }

  /// Value at reference coordinate xi of the given cell (no range check).
  double value_in_cell(int cell, double xi) const;

  /// L2(Omega) norm from the coefficients, exact by orthonormality.
  double l2_norm() const;
  /// L2(Omega) norm by elementwise Gauss quadrature with the given point count.
  double l2_norm_quadrature(int points) const;
  /// Integral over Omega.
  double integral() const;
  /// (u, v) in L2(Omega).
  double inner(const Field& other) const;

 private:
  SpacePtr space_;
  Eigen::VectorXd coeffs_;
};

/// Point evaluation with explicit one-sided limits at cell edges.
double eval_field(const Field& u, double x, Side side = Side::right_limit);

/// Jump u+ - u- at interior edge x_{e+1/2}, e = 0..N-2 (between cells e and e+1).
double interior_jump(const Field& u, int edge);

void require_same_space(const DGSpace& a, const DGSpace& b, const char* what);

}  // namespace boldg
