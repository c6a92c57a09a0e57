#include "boldg/projection.hpp"

#include <cmath>
#include <stdexcept>

namespace boldg {

namespace {

// Moments int g(x(xi)) phi_m(xi) dxi for m = 0..rows-1 on one cell.
Eigen::VectorXd cell_moments(const ScalarFunction& g, const DGSpace& space, int cell, int rows) {
  const QuadRule& rule = space.volume_rule();
  const Mesh& mesh = space.mesh();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(rows);
  for (int q = 0; q < rule.n; ++q) {
    const double gq = g(mesh.to_physical(cell, rule.nodes[q]));
    for (int m = 0; m < rows; ++m) b[m] += rule.weights[q] * gq * space.basis_at_nodes()(q, m);
  }
  return b;
}

}  // namespace

Field l2_project(const ScalarFunction& g, const SpacePtr& space) {
  Field u(space);
  for (int i = 0; i < space->cells(); ++i) u.cell(i) = cell_moments(g, *space, i, space->modes());
  return u;
}

Field radau_project(const ScalarFunction& g, const SpacePtr& space) {
  const int k = space->degree();
  if (k < 1) throw std::invalid_argument("radau_project: degree must be at least 1");
  const int nm = space->modes();
  const QuadRule& rule = space->volume_rule();

  // k moment rows against phi_0..phi_{k-1}, then the right-endpoint row.
  Eigen::MatrixXd system = Eigen::MatrixXd::Zero(nm, nm);
  for (int l = 0; l < k; ++l)
    for (int m = 0; m < nm; ++m)
      for (int q = 0; q < rule.n; ++q)
        system(l, m) += rule.weights[q] * space->basis_at_nodes()(q, l) * space->basis_at_nodes()(q, m);
  system.row(k) = space->right_trace().transpose();
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(system);

  Field u(space);
  const Mesh& mesh = space->mesh();
  for (int i = 0; i < space->cells(); ++i) {
    Eigen::VectorXd rhs(nm);
    rhs.head(k) = cell_moments(g, *space, i, k);
    rhs[k] = g(mesh.edges()[i + 1]);
    u.cell(i) = lu.solve(rhs);
  }
  return u;
}

}  // namespace boldg
