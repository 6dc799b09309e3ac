#pragma once

#include <Eigen/Dense>

#include <memory>
#include <stdexcept>
#include <string>
#include <utility>

namespace lgf {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

struct RunReport;

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;

  /// Drivers attach the logs gathered up to the failure point so callers
  /// can post-mortem an aborted run; empty unless a run was in flight.
  void attach_partial_report(std::shared_ptr<const RunReport> report) {
    partial_report_ = std::move(report);
  }
  const std::shared_ptr<const RunReport>& partial_report() const { return partial_report_; }

private:
  std::shared_ptr<const RunReport> partial_report_;
};

/// Raised when an evaluation or integration produces NaN/Inf. Carries the
/// pseudo-time and state at the failure point so the driver can decide
/// whether to discard the surrogate and fall back to the true optimizer.
class NonFiniteError : public Error {
public:
  NonFiniteError(const std::string& what, double t, Vector state)
      : Error(what), t_(t), state_(std::move(state)) {}

  double time() const noexcept { return t_; }
  const Vector& state() const noexcept { return state_; }

private:
  double t_;
  Vector state_;
};

/// Raised when the adaptive integrator exhausts its step budget.
class MaxStepsError : public Error {
public:
  MaxStepsError(const std::string& what, double t, Vector state)
      : Error(what), t_(t), state_(std::move(state)) {}

  double time() const noexcept { return t_; }
  const Vector& state() const noexcept { return state_; }

private:
  double t_;
  Vector state_;
};

/// Raised by hessian_solve when the factorization reports a (numerically)
/// singular Hessian. Never regularized away; the caller owns the policy.
class SingularHessianError : public Error {
public:
  using Error::Error;
};

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  return m.allFinite();
}

}  // namespace lgf
