#include "boldg/time_integration.hpp"

#include <Eigen/LU>
#include <unsupported/Eigen/IterativeSolvers>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "boldg/errors.hpp"
#include "boldg/linalg.hpp"

namespace boldg {

double resolve_tau(const TimeConfig& cfg, const OperatorSet& ops) {
  if (!(cfg.tau_coefficient > 0.0)) throw ConfigError("tau coefficient must be positive");
  const double h = ops.space().mesh().h();
  switch (cfg.tau_rule) {
    case TauRule::proportional_h:
      return cfg.tau_coefficient * h;
    case TauRule::proportional_h2:
      return cfg.tau_coefficient * h * h;
    case TauRule::fixed:
      return cfg.tau_coefficient;
    case TauRule::operator_norm: {
      const NormEstimate norm = estimate_spectral_norm([&](const Eigen::VectorXd& v) { return ops.apply_lh(v); },
                                                       [&](const Eigen::VectorXd& v) { return ops.apply_lh_transpose(v); },
                                                       ops.dofs());
      if (!(norm.value > 0.0)) throw ConfigError("operator_norm step rule needs a nonzero operator");
      return cfg.tau_coefficient / norm.value;
    }
  }
  throw ConfigError("unknown step rule");
}

std::vector<double> step_sizes(double tau, double t_final) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ConfigError("time step must be positive and finite");
  if (!(t_final >= 0.0) || !std::isfinite(t_final)) throw ConfigError("final time must be nonnegative");
  std::vector<double> steps;
  if (t_final == 0.0) return steps;
  // Tolerate representation error in t_final / tau before adding a sliver step.
  const auto count = static_cast<long long>(std::ceil(t_final / tau * (1.0 - 1e-12)));
  const long long m = std::max(count, 1LL);
  steps.assign(static_cast<std::size_t>(m), tau);
  steps.back() = t_final - static_cast<double>(m - 1) * tau;
  return steps;
}

// ---------------------------------------------------------------------------
// Newton

NewtonResult newton_solve(const VectorFunction& residual, const LinearSolve& solve, const Eigen::VectorXd& guess,
                          double tol, int max_iter) {
  if (!(tol > 0.0)) throw std::invalid_argument("newton_solve: tolerance must be positive");
  if (max_iter < 1) throw std::invalid_argument("newton_solve: max_iter must be positive");
  NewtonResult out{guess, 0, 0.0};
  Eigen::VectorXd r = residual(out.x);
  out.residual_norm = r.norm();
  while (!(out.residual_norm <= tol)) {
    if (!std::isfinite(out.residual_norm) || out.iterations >= max_iter) {
      throw NewtonDiverged(out.residual_norm, out.iterations);
    }
    out.x += solve(out.x, -r);
    ++out.iterations;
    r = residual(out.x);
    out.residual_norm = r.norm();
  }
  return out;
}

NewtonResult newton_solve(const VectorFunction& residual, const MatrixFunction& jacobian,
                          const Eigen::VectorXd& guess, double tol, int max_iter) {
  auto solve = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& rhs) -> Eigen::VectorXd {
    const Eigen::MatrixXd j = jacobian(x);
    if (!j.allFinite()) throw SingularJacobian("newton_solve: non-finite Jacobian");
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(j);
    if (!lu.isInvertible()) throw SingularJacobian("newton_solve: singular Jacobian");
    return lu.solve(rhs);
  };
  return newton_solve(residual, LinearSolve(solve), guess, tol, max_iter);
}

// ---------------------------------------------------------------------------
// Crank-Nicolson

namespace {

// GMRES preconditioner backed by an existing LU factor of the linear Jacobian.
class FactorPreconditioner {
 public:
  FactorPreconditioner() = default;
  void set(const Eigen::PartialPivLU<Eigen::MatrixXd>* lu) { lu_ = lu; }

  template <class M>
  FactorPreconditioner& analyzePattern(const M&) { return *this; }
  template <class M>
  FactorPreconditioner& factorize(const M&) { return *this; }
  template <class M>
  FactorPreconditioner& compute(const M&) { return *this; }

  template <class Rhs>
  Eigen::VectorXd solve(const Rhs& b) const { return lu_->solve(b); }
  Eigen::ComputationInfo info() const { return Eigen::Success; }

 private:
  const Eigen::PartialPivLU<Eigen::MatrixXd>* lu_ = nullptr;
};

}  // namespace

struct CrankNicolson::Factor {
  double tau;
  Eigen::MatrixXd jlin;  // M - tau/2 A
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;
};

CrankNicolson::CrankNicolson(const OperatorSet& ops, FluxFunction f, TimeConfig cfg)
    : ops_(&ops), f_(std::move(f)), cfg_(cfg), a_(ops.linear_moment_matrix()) {
  if (!(cfg_.newton_tol > 0.0)) throw ConfigError("newton_tol must be positive");
  if (cfg_.newton_max_iter < 1) throw ConfigError("newton_max_iter must be positive");
}

CrankNicolson::~CrankNicolson() = default;
CrankNicolson::CrankNicolson(CrankNicolson&&) noexcept = default;
CrankNicolson& CrankNicolson::operator=(CrankNicolson&&) noexcept = default;

const CrankNicolson::Factor& CrankNicolson::factor_for(double tau) {
  for (const auto& f : factors_)
    if (f->tau == tau) return *f;
  // The nominal step and the shortened final step are the only two in a run.
  if (factors_.size() >= 2) factors_.erase(factors_.begin());
  auto f = std::make_unique<Factor>();
  f->tau = tau;
  f->jlin = -0.5 * tau * a_;
  f->jlin.diagonal() += ops_->mass();
  f->lu.compute(f->jlin);
  factors_.push_back(std::move(f));
  return *factors_.back();
}

Eigen::VectorXd CrankNicolson::step(const Eigen::VectorXd& u0, double tau) {
  if (u0.size() != ops_->dofs()) throw std::invalid_argument("CrankNicolson::step: vector size mismatch");
  const Factor& fac = factor_for(tau);
  const Eigen::VectorXd& mass = ops_->mass();
  const bool nonlinear = ops_->flux().nonlinear != NonlinearFlux::none;

  auto residual = [&](const Eigen::VectorXd& u1) -> Eigen::VectorXd {
    const Eigen::VectorXd w = 0.5 * (u0 + u1);
    Eigen::VectorXd r = mass.cwiseProduct(u1 - u0) - tau * (a_ * w);
    if (nonlinear) r -= tau * nonlinear_moments(w, *ops_, f_);
    return r;
  };

  auto solve = [&](const Eigen::VectorXd& u1, const Eigen::VectorXd& rhs) -> Eigen::VectorXd {
    SparseMatrix jf;
    if (nonlinear) {
      jf = nonlinear_jacobian(0.5 * (u0 + u1), *ops_, f_);
      jf.prune(0.0);
    }
    if (jf.nonZeros() == 0) return fac.lu.solve(rhs);
    // dR/du1 = M - tau/2 (A + J_F(w)); the chain rule through w contributes the 1/2.
    Eigen::MatrixXd j = fac.jlin;
    j -= 0.5 * tau * Eigen::MatrixXd(jf);
    Eigen::GMRES<Eigen::MatrixXd, FactorPreconditioner> gmres;
    gmres.preconditioner().set(&fac.lu);
    gmres.set_restart(60);
    gmres.setTolerance(cfg_.gmres_tol);
    gmres.setMaxIterations(600);
    gmres.compute(j);
    Eigen::VectorXd dx = gmres.solve(rhs);
    if (gmres.info() == Eigen::NumericalIssue || !dx.allFinite()) {
      throw SingularJacobian("Crank-Nicolson: GMRES breakdown in the Newton correction");
    }
    return dx;
  };

  const NewtonResult res = newton_solve(residual, LinearSolve(solve), u0, cfg_.newton_tol, cfg_.newton_max_iter);
  last_iterations_ = res.iterations;
  last_residual_ = res.residual_norm;
  return res.x;
}

Eigen::VectorXd cn_step(const Eigen::VectorXd& u, double tau, const OperatorSet& ops, const FluxFunction& f,
                        const TimeConfig& cfg) {
  CrankNicolson cn(ops, f, cfg);
  return cn.step(u, tau);
}

// ---------------------------------------------------------------------------
// Explicit schemes

Eigen::VectorXd rk4_step(const Eigen::VectorXd& u, double tau, const VectorFunction& rhs) {
  const Eigen::VectorXd k1 = rhs(u);
  const Eigen::VectorXd k2 = rhs(u + 0.5 * tau * k1);
  const Eigen::VectorXd k3 = rhs(u + 0.5 * tau * k2);
  const Eigen::VectorXd k4 = rhs(u + tau * k3);
  Eigen::VectorXd out = u + (tau / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  require_finite(out, "rk4_step");
  return out;
}

const LowStorageTable& lserk54_table() {
  // Carpenter, M. H. and Kennedy, C. A., "Fourth-order 2N-storage Runge-Kutta
  // schemes", NASA TM-109112 (1994), solution 3.
  static const LowStorageTable table{
      {0.0, -567301805773.0 / 1357537059087.0, -2404267990393.0 / 2016746695238.0,
       -3550918686646.0 / 2091501179385.0, -1275806237668.0 / 842570457699.0},
      {1432997174477.0 / 9575080441755.0, 5161836677717.0 / 13612068292357.0, 1720146321549.0 / 2090206949498.0,
       3134564353537.0 / 4481467310338.0, 2277821191437.0 / 14882151754819.0},
      {0.0, 1432997174477.0 / 9575080441755.0, 2526269341429.0 / 6820363183890.0,
       2006345519317.0 / 3224310063776.0, 2802321613138.0 / 2924317926251.0}};
  return table;
}

Eigen::VectorXd lserk54_step(const Eigen::VectorXd& u, double tau, const VectorFunction& rhs) {
  const LowStorageTable& t = lserk54_table();
  Eigen::VectorXd y = u;
  Eigen::VectorXd k = Eigen::VectorXd::Zero(u.size());
  for (int j = 0; j < 5; ++j) {
    k = t.a[j] * k + tau * rhs(y);
    y += t.b[j] * k;
  }
  require_finite(y, "lserk54_step");
  return y;
}

// ---------------------------------------------------------------------------
// Driver

namespace {

DiagnosticSample sample(int step, double time, const Eigen::VectorXd& u, const OperatorSet& ops, double mass0,
                        double norm0) {
  const Field field(ops.space_ptr(), u);
  DiagnosticSample s{step, time, field.l2_norm(), 0.0, 0.0};
  const double nan = std::numeric_limits<double>::quiet_NaN();
  s.c1 = mass0 != 0.0 ? field.integral() / mass0 : nan;
  s.c2 = norm0 != 0.0 ? s.norm / norm0 : nan;
  return s;
}

}  // namespace

SimulationResult run_simulation(const Eigen::VectorXd& u0, const OperatorSet& ops, const FluxFunction& f,
                                const TimeConfig& cfg, const SimulationHooks& hooks) {
  if (u0.size() != ops.dofs()) throw std::invalid_argument("run_simulation: initial vector size mismatch");
  SimulationResult out;
  out.u = u0;
  if (cfg.t_final == 0.0) return out;

  out.tau = resolve_tau(cfg, ops);
  const std::vector<double> taus = step_sizes(out.tau, cfg.t_final);

  const Field initial(ops.space_ptr(), u0);
  const double mass0 = initial.integral();
  const double norm0 = initial.l2_norm();
  if (hooks.diagnostic_interval > 0) out.diagnostics.push_back(sample(0, 0.0, u0, ops, mass0, norm0));

  std::unique_ptr<CrankNicolson> cn;
  if (cfg.scheme == Scheme::crank_nicolson) cn = std::make_unique<CrankNicolson>(ops, f, cfg);
  const VectorFunction rhs = [&](const Eigen::VectorXd& v) { return nonlinear_rhs(v, ops, f); };

  double time = 0.0;
  const int total = static_cast<int>(taus.size());
  for (int n = 0; n < total; ++n) {
    const double tau = taus[n];
    StepInfo info{n + 1, 0.0, tau, 0};
    try {
      switch (cfg.scheme) {
        case Scheme::crank_nicolson:
          out.u = cn->step(out.u, tau);
          info.newton_iterations = cn->last_iterations();
          break;
        case Scheme::rk4_classical:
          out.u = rk4_step(out.u, tau, rhs);
          break;
        case Scheme::lserk54:
          out.u = lserk54_step(out.u, tau, rhs);
          break;
      }
    } catch (const StepFailed&) {
      throw;
    } catch (const NumericalError& e) {
      throw StepFailed(n + 1, time, e.what());
    }
    time = (n + 1 == total) ? cfg.t_final : (n + 1) * out.tau;
    info.time = time;
    out.steps = n + 1;
    out.time = time;
    const bool last = n + 1 == total;
    if (hooks.diagnostic_interval > 0 && ((n + 1) % hooks.diagnostic_interval == 0 || last)) {
      out.diagnostics.push_back(sample(n + 1, time, out.u, ops, mass0, norm0));
    }
    if (hooks.on_step && !hooks.on_step(info, out.u)) {
      out.stopped_early = !last;
      break;
    }
  }
  return out;
}

}  // namespace boldg
