#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "lgf/optim.hpp"

namespace lgf {

enum class OdeMethod { Dopri5, Rk4Fixed };

struct IntegratorConfig {
  double rtol = 1e-7;
  double atol = 1e-9;
  long max_steps = 1'000'000;
  /// Dopri5: starting step guess (otherwise chosen automatically).
  /// Rk4Fixed: the fixed step, required.
  std::optional<double> initial_step;
  OdeMethod method = OdeMethod::Dopri5;

  void validate() const;
};

using OdeRhs = std::function<Vector(double t, const Vector& y)>;

struct IntegrationResult {
  Vector y;                      ///< state at t1
  std::vector<Vector> reported;  ///< states at report_times (dense output)
  long steps = 0;
  long rhs_evals = 0;
};

/// Integrates dy/dt = f(t, y) from t0 to t1 >= t0. Dopri5 runs the embedded
/// 5(4) pair with error norm rms(e_i / (atol + rtol*max(|y_i|, |ŷ_i|))) <= 1,
/// safety 0.9 and step factors clamped to [0.2, 10]; report_times are served
/// by the 4th-order dense interpolant. Rk4Fixed steps with initial_step.
/// Throws NonFiniteError / MaxStepsError carrying t and the last state.
IntegrationResult integrate(const OdeRhs& f, const Vector& y0, double t0,
                            double t1, const IntegratorConfig& cfg,
                            std::span<const double> report_times = {});

/// State of the augmented continuous-time ADAM system.
struct AdamOdeState {
  Vector a;
  Vector m;
  Vector v;  ///< entrywise >= 0 (clamped inside the RHS before sqrt)
  double t = 0.0;
};

using GradientSurrogate = std::function<Vector(const Vector& a)>;

struct AdamIntegrationResult {
  AdamOdeState state;
  std::vector<Vector> reported_a;  ///< a(t) at report_times
  long steps = 0;
  long rhs_evals = 0;
};

/// Integrates the coupled (a, m, v) system with the learned gradient f_hat
/// in place of dz/da and real-exponent bias terms beta^(t/eta). Requires
/// s0.t > 0 (the bias denominators vanish at t = 0).
AdamIntegrationResult integrate_adam_system(
    const GradientSurrogate& f_hat, const AdamOdeState& s0, double t1,
    const AdamParams& params, const IntegratorConfig& cfg,
    std::span<const double> report_times = {});

/// One semi-implicit step of the ADAM ODE with step eta: forward Euler for
/// m and v, backward Euler for a, bias exponents k+1. Reproduces the
/// discrete ADAM update up to floating-point associativity.
AdamOdeState semi_implicit_adam_step(const AdamOdeState& s,
                                     const Eigen::Ref<const Vector>& g, long k,
                                     const AdamParams& params);

}  // namespace lgf
