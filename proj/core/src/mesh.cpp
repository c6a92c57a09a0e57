#include "boldg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace boldg {

Mesh::Mesh(double a, double b, int cells) : a_(a), b_(b), h_(0.0) {
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b)) {
    throw std::invalid_argument("Mesh: require finite a < b");
  }
  if (cells < 1) throw std::invalid_argument("Mesh: cell count must be positive");
  h_ = (b - a) / cells;
  edges_.resize(cells + 1);
  for (int i = 0; i <= cells; ++i) edges_[i] = a + i * h_;
  edges_.back() = b;
  widths_.resize(cells);
  for (int i = 0; i < cells; ++i) {
    widths_[i] = edges_[i + 1] - edges_[i];
    if (!(widths_[i] > 0.0)) throw std::invalid_argument("Mesh: degenerate cell width");
  }
}

int Mesh::locate(double x, Side side) const {
  if (!(x >= a_ && x <= b_)) {
    throw std::out_of_range("Mesh::locate: x = " + std::to_string(x) + " outside the domain");
  }
  const int n = cells();
  // First edge strictly greater than x.
  const auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
  int cell = static_cast<int>(it - edges_.begin()) - 1;
  if (cell >= n) cell = n - 1;
  if (side == Side::left_limit && cell > 0 && x == edges_[cell]) --cell;
  return cell;
}

double Mesh::to_reference(int cell, double x) const { return 2.0 * (x - center(cell)) / width(cell); }

double Mesh::to_physical(int cell, double xi) const { return center(cell) + 0.5 * width(cell) * xi; }

Mesh build_mesh(double a, double b, int cells) { return Mesh(a, b, cells); }

void legendre_basis(int degree, double xi, std::span<double> values, std::span<double> derivatives) {
  double p_prev = 0.0;
  double p = 1.0;
  double dp_prev = 0.0;
  double dp = 0.0;
  for (int m = 0; m <= degree; ++m) {
    const double scale = std::sqrt(m + 0.5);
    values[m] = scale * p;
    if (!derivatives.empty()) derivatives[m] = scale * dp;
    const double p_next = ((2.0 * m + 1.0) * xi * p - m * p_prev) / (m + 1.0);
    const double dp_next = dp_prev + (2.0 * m + 1.0) * p;
    p_prev = p;
    p = p_next;
    dp_prev = dp;
    dp = dp_next;
  }
}

DGSpace::DGSpace(Mesh mesh, int degree, int quad_order)
    : mesh_(std::move(mesh)), degree_(degree), quad_order_(quad_order == 0 ? degree + 2 : quad_order) {
  if (degree_ < 1) throw std::invalid_argument("DGSpace: polynomial degree must be at least 1");
  if (degree_ > 30) throw std::invalid_argument("DGSpace: polynomial degree above 30 is not supported");
  if (quad_order_ < degree_ + 1) {
    throw std::invalid_argument("DGSpace: quad_order must be at least degree + 1");
  }
  rule_ = &gauss_legendre(quad_order_);
  const int nm = modes();
  basis_nodes_.resize(quad_order_, nm);
  deriv_nodes_.resize(quad_order_, nm);
  std::vector<double> v(nm), d(nm);
  for (int q = 0; q < quad_order_; ++q) {
    legendre_basis(degree_, rule_->nodes[q], v, d);
    for (int m = 0; m < nm; ++m) {
      basis_nodes_(q, m) = v[m];
      deriv_nodes_(q, m) = d[m];
    }
  }
  left_trace_.resize(nm);
  right_trace_.resize(nm);
  legendre_basis(degree_, -1.0, std::span(left_trace_.data(), nm));
  legendre_basis(degree_, 1.0, std::span(right_trace_.data(), nm));

  // phi_l' phi_m has degree 2k - 1, exact with k + 1 points.
  const QuadRule& exact = gauss_legendre(degree_ + 1);
  stiffness_ = Eigen::MatrixXd::Zero(nm, nm);
  for (int q = 0; q < exact.n; ++q) {
    legendre_basis(degree_, exact.nodes[q], v, d);
    for (int l = 0; l < nm; ++l)
      for (int m = 0; m < nm; ++m) stiffness_(l, m) += exact.weights[q] * d[l] * v[m];
  }
}

Eigen::VectorXd DGSpace::mass_diagonal() const {
  Eigen::VectorXd m(dofs());
  for (int i = 0; i < cells(); ++i) m.segment(i * modes(), modes()).setConstant(0.5 * mesh_.width(i));
  return m;
}

Eigen::VectorXd DGSpace::inverse_mass_diagonal() const { return mass_diagonal().cwiseInverse(); }

bool DGSpace::compatible(const DGSpace& other) const {
  return this == &other ||
         (degree_ == other.degree_ && quad_order_ == other.quad_order_ && mesh_ == other.mesh_);
}

SpacePtr make_space(Mesh mesh, int degree, int quad_order) {
  return std::make_shared<const DGSpace>(std::move(mesh), degree, quad_order);
}

BasisValues eval_basis(const DGSpace& space, double ref_x, int max_deriv) {
  if (!(std::abs(ref_x) <= 1.0)) throw std::out_of_range("eval_basis: reference coordinate outside [-1, 1]");
  if (max_deriv < 0 || max_deriv > 1) throw std::invalid_argument("eval_basis: max_deriv must be 0 or 1");
  BasisValues out;
  out.values.resize(space.modes());
  if (max_deriv == 1) {
    out.derivatives.resize(space.modes());
    legendre_basis(space.degree(), ref_x, std::span(out.values.data(), space.modes()),
                   std::span(out.derivatives.data(), space.modes()));
  } else {
    legendre_basis(space.degree(), ref_x, std::span(out.values.data(), space.modes()));
  }
  return out;
}

void require_same_space(const DGSpace& a, const DGSpace& b, const char* what) {
  if (!a.compatible(b)) throw std::invalid_argument(std::string(what) + ": space mismatch");
}

Field::Field(SpacePtr space) : space_(std::move(space)) {
  if (!space_) throw std::invalid_argument("Field: null space");
  coeffs_ = Eigen::VectorXd::Zero(space_->dofs());
}

Field::Field(SpacePtr space, Eigen::VectorXd coeffs) : space_(std::move(space)), coeffs_(std::move(coeffs)) {
  if (!space_) throw std::invalid_argument("Field: null space");
  if (coeffs_.size() != space_->dofs()) {
    throw std::invalid_argument("Field: coefficient count " + std::to_string(coeffs_.size()) +
                                " does not match N(k+1) = " + std::to_string(space_->dofs()));
  }
}

double Field::value_in_cell(int cell, double xi) const {
  const int nm = space_->modes();
  double phi[32];
  legendre_basis(space_->degree(), xi, std::span(phi, nm));
  double s = 0.0;
  for (int m = 0; m < nm; ++m) s += coeffs_[cell * nm + m] * phi[m];
  return s;
}

double Field::l2_norm() const {
  double s = 0.0;
  for (int i = 0; i < space_->cells(); ++i) s += 0.5 * space_->mesh().width(i) * cell(i).squaredNorm();
  return std::sqrt(s);
}

double Field::l2_norm_quadrature(int points) const {
  const QuadRule& rule = gauss_legendre(points);
  double s = 0.0;
  for (int i = 0; i < space_->cells(); ++i) {
    double cell_sum = 0.0;
    for (int q = 0; q < rule.n; ++q) {
      const double v = value_in_cell(i, rule.nodes[q]);
      cell_sum += rule.weights[q] * v * v;
    }
    s += 0.5 * space_->mesh().width(i) * cell_sum;
  }
  return std::sqrt(s);
}

double Field::integral() const {
  // Only the constant mode has a nonzero mean: int phi_0 dxi = sqrt(2).
  double s = 0.0;
  for (int i = 0; i < space_->cells(); ++i) s += 0.5 * space_->mesh().width(i) * std::sqrt(2.0) * cell(i)[0];
  return s;
}

double Field::inner(const Field& other) const {
  require_same_space(*space_, other.space(), "Field::inner");
  return (space_->mass_diagonal().array() * coeffs_.array() * other.coeffs_.array()).sum();
}

double eval_field(const Field& u, double x, Side side) {
  const Mesh& mesh = u.space().mesh();
  const int cell = mesh.locate(x, side);
  const double xi = std::clamp(mesh.to_reference(cell, x), -1.0, 1.0);
  return u.value_in_cell(cell, xi);
}

double interior_jump(const Field& u, int edge) {
  const int n = u.space().cells();
  if (edge < 0 || edge >= n - 1) throw std::out_of_range("interior_jump: edge index out of range");
  return u.value_in_cell(edge + 1, -1.0) - u.value_in_cell(edge, 1.0);
}

}  // namespace boldg
