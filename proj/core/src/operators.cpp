#include "boldg/operators.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "boldg/errors.hpp"

namespace boldg {

FluxFunction FluxFunction::burgers() {
  return {"burgers", [](double u) { return 0.5 * u * u; }, [](double u) { return u; }, [](double) { return 1.0; }};
}

FluxFunction FluxFunction::linear(double speed) {
  return {"linear", [speed](double u) { return speed * u; }, [speed](double) { return speed; },
          [](double) { return 0.0; }};
}

FluxFunction FluxFunction::zero() {
  return {"zero", [](double) { return 0.0; }, [](double) { return 0.0; }, [](double) { return 0.0; }};
}

double lax_friedrichs(double u_minus, double u_plus, const FluxFunction& f, double delta) {
  return 0.5 * (f.f(u_minus) + f.f(u_plus)) - 0.5 * delta * (u_plus - u_minus);
}

void require_finite(const Eigen::VectorXd& v, const std::string& what) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) {
      throw NumericalError(what + ": non-finite value at coefficient " + std::to_string(i));
    }
  }
}

namespace {

struct Edge {
  int left;   // -1 for the exterior at x = a
  int right;  // -1 for the exterior at x = b
};

// Interior edges, the periodic wrap edge, or the two exterior edges.
std::vector<Edge> edges_of(int cells, Boundary boundary) {
  std::vector<Edge> e;
  if (boundary == Boundary::zero) e.push_back({-1, 0});
  for (int i = 0; i + 1 < cells; ++i) e.push_back({i, i + 1});
  if (boundary == Boundary::periodic) {
    e.push_back({cells - 1, 0});
  } else {
    e.push_back({cells - 1, -1});
  }
  return e;
}

using Triplets = std::vector<Eigen::Triplet<double>>;

void add_block(Triplets& t, int nm, int row_cell, int col_cell, const Eigen::MatrixXd& b) {
  for (int l = 0; l < nm; ++l)
    for (int m = 0; m < nm; ++m)
      if (b(l, m) != 0.0) t.emplace_back(row_cell * nm + l, col_cell * nm + m, b(l, m));
}

}  // namespace

OperatorSet::OperatorSet(SpacePtr space, FluxConfig flux, std::shared_ptr<const HilbertOperator> hilbert)
    : space_(std::move(space)), flux_(flux), hilbert_(std::move(hilbert)) {
  if (!space_ || !hilbert_) throw std::invalid_argument("OperatorSet: null space or Hilbert operator");
  require_same_space(*space_, hilbert_->space(), "assemble_operators");

  const int n = space_->cells();
  const int nm = space_->modes();
  const Eigen::VectorXd& lt = space_->left_trace();
  const Eigen::VectorXd& rt = space_->right_trace();
  const Eigen::MatrixXd& s = space_->stiffness();
  // rr(l, m) = phi_l(1) phi_m(1), ll(l, m) = phi_l(-1) phi_m(-1).
  const Eigen::MatrixXd rr = rt * rt.transpose();
  const Eigen::MatrixXd ll = lt * lt.transpose();

  Triplets tm, tp;
  for (int i = 0; i < n; ++i) {
    add_block(tm, nm, i, i, -s);
    add_block(tp, nm, i, i, -s);
  }

  const bool plus = flux_.orientation == Orientation::p_plus_u_minus;
  for (const Edge& e : edges_of(n, flux_.boundary)) {
    if (e.left < 0 || e.right < 0) continue;
    // -u-hat [z]: row R picks up -phi_l(-1), row L picks up +phi_l(1).
    const int u_cell = plus ? e.left : e.right;
    const Eigen::VectorXd& u_trace = plus ? rt : lt;
    add_block(tm, nm, e.right, u_cell, -lt * u_trace.transpose());
    add_block(tm, nm, e.left, u_cell, rt * u_trace.transpose());
    // -p-hat [v].
    const int p_cell = plus ? e.right : e.left;
    const Eigen::VectorXd& p_trace = plus ? lt : rt;
    add_block(tp, nm, e.right, p_cell, -lt * p_trace.transpose());
    add_block(tp, nm, e.left, p_cell, rt * p_trace.transpose());
  }
  if (flux_.boundary == Boundary::zero) {
    // u-hat = 0 at both ends; p-hat is the interior trace.
    add_block(tp, nm, 0, 0, -ll);
    add_block(tp, nm, n - 1, n - 1, rr);
  }

  dm_.resize(space_->dofs(), space_->dofs());
  dp_.resize(space_->dofs(), space_->dofs());
  dm_.setFromTriplets(tm.begin(), tm.end());
  dp_.setFromTriplets(tp.begin(), tp.end());
  dm_.prune(0.0);
  dp_.prune(0.0);
  mass_ = space_->mass_diagonal();
  minv_ = space_->inverse_mass_diagonal();
}

Eigen::VectorXd OperatorSet::apply_linear_moments(const Eigen::VectorXd& u) const {
  Eigen::VectorXd q = minv_.cwiseProduct(dm_ * u);
  Eigen::VectorXd p = minv_.cwiseProduct(hilbert_->apply_moments(q));
  return dp_ * p;
}

Eigen::VectorXd OperatorSet::apply_linear_moments_transpose(const Eigen::VectorXd& v) const {
  Eigen::VectorXd w = minv_.cwiseProduct(dp_.transpose() * v);
  Eigen::VectorXd z = minv_.cwiseProduct(hilbert_->apply_transpose_moments(w));
  return dm_.transpose() * z;
}

Eigen::VectorXd OperatorSet::apply_lh(const Eigen::VectorXd& u) const {
  return minv_.cwiseProduct(apply_linear_moments(u));
}

Eigen::VectorXd OperatorSet::apply_lh_transpose(const Eigen::VectorXd& v) const {
  return apply_linear_moments_transpose(minv_.cwiseProduct(v));
}

Eigen::MatrixXd OperatorSet::linear_moment_matrix() const {
  // Minv K Minv Dm, then Dp on the left.
  const Eigen::MatrixXd dm_dense = minv_.asDiagonal() * Eigen::MatrixXd(dm_);
  const Eigen::MatrixXd kdm = minv_.asDiagonal() * (hilbert_->dense() * dm_dense);
  return dp_ * kdm;
}

Eigen::MatrixXd OperatorSet::Lh() const { return minv_.asDiagonal() * linear_moment_matrix(); }

OperatorSet assemble_operators(const SpacePtr& space, const FluxConfig& flux,
                               std::shared_ptr<const HilbertOperator> hilbert) {
  return OperatorSet(space, flux, std::move(hilbert));
}

namespace {

// Largest |f'| over a cell's quadrature nodes and both traces, with its location.
struct CellSpeed {
  double value = 0.0;
  int cell = -1;    // -1: attained at the exterior value 0
  double xi = 0.0;  // reference coordinate of the maximizer
  double u = 0.0;
};

struct NonlinearSetup {
  std::vector<CellSpeed> cell_speed;
  CellSpeed exterior;
  CellSpeed global;
};

NonlinearSetup speeds(const Eigen::VectorXd& u, const DGSpace& space, const FluxFunction& f) {
  const int n = space.cells();
  const int nm = space.modes();
  const QuadRule& rule = space.volume_rule();
  const Eigen::MatrixXd& b = space.basis_at_nodes();
  NonlinearSetup s;
  s.cell_speed.resize(n);
  s.exterior = {std::abs(f.df(0.0)), -1, 0.0, 0.0};
  s.global = s.exterior;
  for (int i = 0; i < n; ++i) {
    const auto c = u.segment(i * nm, nm);
    CellSpeed best{-1.0, i, 0.0, 0.0};
    auto consider = [&](double xi, double value) {
      const double speed = std::abs(f.df(value));
      if (speed > best.value) best = {speed, i, xi, value};
    };
    for (int q = 0; q < rule.n; ++q) consider(rule.nodes[q], b.row(q).dot(c));
    consider(-1.0, space.left_trace().dot(c));
    consider(1.0, space.right_trace().dot(c));
    s.cell_speed[i] = best;
    if (best.value > s.global.value) s.global = best;
  }
  return s;
}

const CellSpeed& edge_speed(const NonlinearSetup& s, const Edge& e, DeltaMode mode) {
  if (mode == DeltaMode::global_max) return s.global;
  const CellSpeed& a = e.left < 0 ? s.exterior : s.cell_speed[e.left];
  const CellSpeed& b = e.right < 0 ? s.exterior : s.cell_speed[e.right];
  return b.value > a.value ? b : a;
}

}  // namespace

Eigen::VectorXd nonlinear_moments(const Eigen::VectorXd& u, const OperatorSet& ops, const FluxFunction& f) {
  const DGSpace& space = ops.space();
  if (u.size() != space.dofs()) throw std::invalid_argument("nonlinear_moments: vector size mismatch");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(space.dofs());
  if (ops.flux().nonlinear == NonlinearFlux::none) return out;

  const int n = space.cells();
  const int nm = space.modes();
  const QuadRule& rule = space.volume_rule();
  const Eigen::MatrixXd& b = space.basis_at_nodes();
  const Eigen::MatrixXd& db = space.derivative_at_nodes();
  const Eigen::VectorXd& lt = space.left_trace();
  const Eigen::VectorXd& rt = space.right_trace();

  Eigen::VectorXd fw(rule.n);
  for (int i = 0; i < n; ++i) {
    const auto c = u.segment(i * nm, nm);
    for (int q = 0; q < rule.n; ++q) fw[q] = rule.weights[q] * f.f(b.row(q).dot(c));
    out.segment(i * nm, nm) += db.transpose() * fw;
  }

  const NonlinearSetup s = speeds(u, space, f);
  for (const Edge& e : edges_of(n, ops.flux().boundary)) {
    const double um = e.left < 0 ? 0.0 : rt.dot(u.segment(e.left * nm, nm));
    const double up = e.right < 0 ? 0.0 : lt.dot(u.segment(e.right * nm, nm));
    const double fhat = lax_friedrichs(um, up, f, edge_speed(s, e, ops.flux().delta_mode).value);
    if (e.right >= 0) out.segment(e.right * nm, nm) += fhat * lt;
    if (e.left >= 0) out.segment(e.left * nm, nm) -= fhat * rt;
  }
  return out;
}

SparseMatrix nonlinear_jacobian(const Eigen::VectorXd& u, const OperatorSet& ops, const FluxFunction& f) {
  const DGSpace& space = ops.space();
  if (u.size() != space.dofs()) throw std::invalid_argument("nonlinear_jacobian: vector size mismatch");
  SparseMatrix jac(space.dofs(), space.dofs());
  if (ops.flux().nonlinear == NonlinearFlux::none) return jac;

  const int n = space.cells();
  const int nm = space.modes();
  const QuadRule& rule = space.volume_rule();
  const Eigen::MatrixXd& b = space.basis_at_nodes();
  const Eigen::MatrixXd& db = space.derivative_at_nodes();
  const Eigen::VectorXd& lt = space.left_trace();
  const Eigen::VectorXd& rt = space.right_trace();

  Triplets t;
  Eigen::VectorXd w(rule.n);
  for (int i = 0; i < n; ++i) {
    const auto c = u.segment(i * nm, nm);
    for (int q = 0; q < rule.n; ++q) w[q] = rule.weights[q] * f.df(b.row(q).dot(c));
    add_block(t, nm, i, i, db.transpose() * w.asDiagonal() * b);
  }

  const NonlinearSetup s = speeds(u, space, f);
  std::vector<double> phi(nm);
  for (const Edge& e : edges_of(n, ops.flux().boundary)) {
    const double um = e.left < 0 ? 0.0 : rt.dot(u.segment(e.left * nm, nm));
    const double up = e.right < 0 ? 0.0 : lt.dot(u.segment(e.right * nm, nm));
    const CellSpeed& sp = edge_speed(s, e, ops.flux().delta_mode);
    const double delta = sp.value;
    const double d_um = 0.5 * (f.df(um) + delta);
    const double d_up = 0.5 * (f.df(up) - delta);
    const double d_delta = -0.5 * (up - um);

    // Row sign and test trace for each side that owns coefficients.
    auto emit = [&](int row_cell, double row_sign, const Eigen::VectorXd& row_trace) {
      for (int l = 0; l < nm; ++l) {
        const double rl = row_sign * row_trace[l];
        if (e.left >= 0)
          for (int m = 0; m < nm; ++m) t.emplace_back(row_cell * nm + l, e.left * nm + m, rl * d_um * rt[m]);
        if (e.right >= 0)
          for (int m = 0; m < nm; ++m) t.emplace_back(row_cell * nm + l, e.right * nm + m, rl * d_up * lt[m]);
        if (sp.cell >= 0 && d_delta != 0.0) {
          const double fp = f.df(sp.u);
          const double sign = fp > 0.0 ? 1.0 : (fp < 0.0 ? -1.0 : 0.0);
          legendre_basis(space.degree(), sp.xi, phi);
          for (int m = 0; m < nm; ++m)
            t.emplace_back(row_cell * nm + l, sp.cell * nm + m, rl * d_delta * sign * f.d2f(sp.u) * phi[m]);
        }
      }
    };
    if (e.right >= 0) emit(e.right, 1.0, lt);
    if (e.left >= 0) emit(e.left, -1.0, rt);
  }
  jac.setFromTriplets(t.begin(), t.end());
  return jac;
}

Eigen::VectorXd nonlinear_rhs(const Eigen::VectorXd& u, const OperatorSet& ops, const FluxFunction& f) {
  require_finite(u, "nonlinear_rhs input");
  Eigen::VectorXd r = nonlinear_moments(u, ops, f) + ops.apply_linear_moments(u);
  r.array() *= ops.Minv().array();
  require_finite(r, "nonlinear_rhs output");
  return r;
}

}  // namespace boldg
