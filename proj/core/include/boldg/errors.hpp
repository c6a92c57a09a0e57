#pragma once

#include <stdexcept>
#include <string>

namespace boldg {

/// Invalid or inconsistent run configuration (CLI exit code 2).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Non-finite state, failed nonlinear solve or eigensolver failure (exit code 3).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NewtonDiverged : public NumericalError {
 public:
  NewtonDiverged(double residual, int iterations)
      : NumericalError("Newton iteration did not converge: residual " + std::to_string(residual) +
                       " after " + std::to_string(iterations) + " iterations"),
        residual_(residual),
        iterations_(iterations) {}

  double residual() const noexcept { return residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

class SingularJacobian : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// A time step failed; wraps the underlying numerical error with its position.
class StepFailed : public NumericalError {
 public:
  StepFailed(int step, double time, const std::string& cause)
      : NumericalError("step " + std::to_string(step) + " at t = " + std::to_string(time) + ": " + cause),
        step_(step),
        time_(time) {}

  int step() const noexcept { return step_; }
  double time() const noexcept { return time_; }

 private:
  int step_;
  double time_;
};

/// File system failures, always carrying the offending path (exit code 4).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace boldg
