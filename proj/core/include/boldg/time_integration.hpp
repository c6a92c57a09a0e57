#pragma once

#include <Eigen/Dense>

#include <array>
#include <functional>
#include <memory>
#include <vector>

#include "boldg/operators.hpp"

namespace boldg {

enum class Scheme { crank_nicolson, rk4_classical, lserk54 };

/// How the nominal step is chosen.
///  - proportional_h:  tau = c h
///  - proportional_h2: tau = c h^2
///  - fixed:           tau = c
///  - operator_norm:   tau = c / |Lh|, with |Lh| from power iteration
enum class TauRule { proportional_h, proportional_h2, fixed, operator_norm };

struct TimeConfig {
  Scheme scheme = Scheme::crank_nicolson;
  TauRule tau_rule = TauRule::proportional_h;
  double tau_coefficient = 0.5;
  double t_final = 1.0;
  double newton_tol = 1e-12;
  int newton_max_iter = 50;
  /// Relative tolerance of the preconditioned GMRES solve inside each Newton step.
  double gmres_tol = 1e-10;
};

/// Nominal step for the configuration on this operator set.
double resolve_tau(const TimeConfig& cfg, const OperatorSet& ops);

/// Step sizes covering [0, t_final]: constant tau, with the last step shortened
/// so the sum is t_final. Empty when t_final == 0.
std::vector<double> step_sizes(double tau, double t_final);

// ---------------------------------------------------------------------------
// Newton

struct NewtonResult {
  Eigen::VectorXd x;
  int iterations = 0;
  double residual_norm = 0.0;
};

using VectorFunction = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
/// Returns dx solving J(x) dx = rhs.
using LinearSolve = std::function<Eigen::VectorXd(const Eigen::VectorXd& x, const Eigen::VectorXd& rhs)>;
using MatrixFunction = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

/// Newton iteration until |R(x)|_2 <= tol. Throws NewtonDiverged after max_iter
/// updates or on a non-finite residual.
NewtonResult newton_solve(const VectorFunction& residual, const LinearSolve& solve, const Eigen::VectorXd& guess,
                          double tol, int max_iter);

/// Dense-Jacobian overload; throws SingularJacobian when J(x) is not invertible.
NewtonResult newton_solve(const VectorFunction& residual, const MatrixFunction& jacobian,
                          const Eigen::VectorXd& guess, double tol, int max_iter);

// ---------------------------------------------------------------------------
// Crank-Nicolson

/// Solves M(u1 - u0) = tau F(f(w)) + tau A w with w = (u0 + u1)/2 by Newton.
/// The linear part of the Jacobian, M - tau/2 A, is factored once per distinct
/// tau; the nonlinear part enters through GMRES preconditioned by that factor.
class CrankNicolson {
 public:
  CrankNicolson(const OperatorSet& ops, FluxFunction f, TimeConfig cfg);
  ~CrankNicolson();
  CrankNicolson(CrankNicolson&&) noexcept;
  CrankNicolson& operator=(CrankNicolson&&) noexcept;

  Eigen::VectorXd step(const Eigen::VectorXd& u, double tau);

  int last_iterations() const noexcept { return last_iterations_; }
  double last_residual() const noexcept { return last_residual_; }

 private:
  struct Factor;
  const Factor& factor_for(double tau);

  const OperatorSet* ops_;
  FluxFunction f_;
  TimeConfig cfg_;
  Eigen::MatrixXd a_;
  std::vector<std::unique_ptr<Factor>> factors_;
  int last_iterations_ = 0;
  double last_residual_ = 0.0;
};

/// One Crank-Nicolson step (builds a throwaway stepper; prefer CrankNicolson in loops).
Eigen::VectorXd cn_step(const Eigen::VectorXd& u, double tau, const OperatorSet& ops, const FluxFunction& f,
                        const TimeConfig& cfg);

// ---------------------------------------------------------------------------
// Explicit schemes (autonomous right-hand sides)

Eigen::VectorXd rk4_step(const Eigen::VectorXd& u, double tau, const VectorFunction& rhs);

/// Five-stage, fourth-order low-storage coefficients (Carpenter and Kennedy, 1994).
/// c holds the stage times, used only by non-autonomous right-hand sides.
struct LowStorageTable {
  std::array<double, 5> a;
  std::array<double, 5> b;
  std::array<double, 5> c;
};
const LowStorageTable& lserk54_table();

Eigen::VectorXd lserk54_step(const Eigen::VectorXd& u, double tau, const VectorFunction& rhs);

// ---------------------------------------------------------------------------
// Driver

struct StepInfo {
  int step = 0;  // number of completed steps
  double time = 0.0;
  double tau = 0.0;
  int newton_iterations = 0;
};

struct DiagnosticSample {
  int step = 0;
  double time = 0.0;
  double norm = 0.0;  // L2(Omega)
  double c1 = 0.0;    // mass ratio, NaN if the initial mass is zero
  double c2 = 0.0;    // norm ratio, NaN if the initial norm is zero
};

struct SimulationHooks {
  /// Record a DiagnosticSample every this many steps (and at the end); 0 disables.
  int diagnostic_interval = 0;
  /// Called after every step; return false to stop early.
  std::function<bool(const StepInfo&, const Eigen::VectorXd&)> on_step;
};

struct SimulationResult {
  Eigen::VectorXd u;
  int steps = 0;
  double time = 0.0;
  double tau = 0.0;
  bool stopped_early = false;
  std::vector<DiagnosticSample> diagnostics;
};

/// Advances u0 to cfg.t_final. Step failures are rethrown as StepFailed.
SimulationResult run_simulation(const Eigen::VectorXd& u0, const OperatorSet& ops, const FluxFunction& f,
                                const TimeConfig& cfg, const SimulationHooks& hooks = {});

}  // namespace boldg
