#pragma once

#include "lgf/types.hpp"

namespace lgf {

/// Abstract evaluation surface for an optimization problem. Stochastic
/// objectives may return noisy (unbiased) gradients; draws must be
/// replayable under a fixed seed. Objectives that keep per-call state
/// declare single_threaded() and the drivers honor it.
class Objective {
public:
  virtual ~Objective() = default;

  virtual Index dim() const = 0;
  virtual double value(const Eigen::Ref<const Vector>& a) const = 0;
  virtual Vector gradient(const Eigen::Ref<const Vector>& a) const = 0;

  virtual bool has_hessian_solve() const { return false; }
  /// Solves (d^2 z / da da)(a) x = rhs. Throws SingularHessianError when the
  /// factorization breaks down; no automatic regularization.
  virtual Vector hessian_solve(const Eigen::Ref<const Vector>& a,
                               const Eigen::Ref<const Vector>& rhs) const;

  virtual bool stochastic() const { return false; }
  virtual bool single_threaded() const { return false; }
};

struct AdamParams {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double eta = 1e-3;

  void validate() const;
};

Vector gd_step(const Objective& obj, const Eigen::Ref<const Vector>& a,
               double eta);

/// Damped Newton update a - eta * H^{-1} grad. Requires hessian_solve.
Vector newton_step(const Objective& obj, const Eigen::Ref<const Vector>& a,
                   double eta);

/// Discrete ADAM bookkeeping: k counts completed iterations, so the bias
/// exponents of the next step are k+1.
struct AdamState {
  Vector a;
  Vector m;
  Vector v;
  long k = 0;

  static AdamState fresh(Vector a0);
};

AdamState adam_step(const Objective& obj, const AdamState& s,
                    const AdamParams& params);

/// Same update with a precomputed gradient, so callers that record the
/// gradient do not pay for it twice (and follow the identical code path).
AdamState adam_step_with_gradient(const Eigen::Ref<const Vector>& g,
                                  const AdamState& s, const AdamParams& params);

}  // namespace lgf
