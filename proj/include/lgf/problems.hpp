#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>

#include "lgf/optim.hpp"

namespace lgf {

/// z(a) = 1/2 aᵀQa - bᵀa with Q symmetric positive definite. Exact
/// minimizer Q⁻¹b; used as the oracle fixture throughout the tests.
class QuadraticProblem : public Objective {
public:
  QuadraticProblem(Matrix q, Vector b);

  Index dim() const override { return q_.rows(); }
  double value(const Eigen::Ref<const Vector>& a) const override;
  Vector gradient(const Eigen::Ref<const Vector>& a) const override;
  bool has_hessian_solve() const override { return true; }
  Vector hessian_solve(const Eigen::Ref<const Vector>& a,
                       const Eigen::Ref<const Vector>& rhs) const override;

  const Matrix& q() const { return q_; }
  const Vector& b() const { return b_; }
  Vector minimizer() const;

private:
  Matrix q_;
  Vector b_;
  Eigen::LLT<Matrix> llt_;
};

/// Two-parameter conductivity inverse problem for a heated bar: spectral
/// sine discretization, backward-Euler time stepping, measurement generated
/// once at construction from a_true by the same solver. Gradients come from
/// forward sensitivities of the time-stepping recursion.
class HeatInverseProblem : public Objective {
public:
  struct Params {
    int n_modes = 30;
    double dt = 0.005;
    double horizon = 0.25;
    Eigen::Vector2d a_true{2.0, 1.0};
    double source_amplitude = 2000.0;
  };

  explicit HeatInverseProblem(Params params);

  Index dim() const override { return 2; }
  double value(const Eigen::Ref<const Vector>& a) const override;
  Vector gradient(const Eigen::Ref<const Vector>& a) const override;

  /// Modal trajectory u, one row per time level (including t = 0).
  Matrix forward_solve(const Eigen::Ref<const Vector>& a) const;
  const Matrix& measurement() const { return measurement_; }
  const Params& params() const { return params_; }
  /// Stiffness matrix K(a) = a1 K1 + a2 K2 (closed-form integrals).
  Matrix stiffness(const Eigen::Ref<const Vector>& a) const;

private:
  void objective_and_gradient(const Eigen::Ref<const Vector>& a, double* z,
                              Vector* grad) const;

  Params params_;
  int n_steps_ = 0;
  Matrix k1_;  // conductivity block on [0, 1/2]
  Matrix k2_;  // conductivity block on (1/2, 1]
  Matrix measurement_;
};

/// Spectral P-Laplace energy minimization with radiative loss on the unit
/// square (nonlinear heat conduction). Value, gradient and dense Hessian
/// share midpoint-quadrature point data; hessian_solve factors the dense
/// Hessian and reports singularity instead of regularizing.
class PlaplaceProblem : public Objective {
public:
  struct Params {
    int modes_per_dim = 15;
    int p_nl = 2;        ///< nonlinearity exponent (not the library order)
    double sigma = 4.0;  ///< emissivity
    int quad_per_dim = 75;
  };

  explicit PlaplaceProblem(Params params);

  Index dim() const override { return n_; }
  double value(const Eigen::Ref<const Vector>& a) const override;
  Vector gradient(const Eigen::Ref<const Vector>& a) const override;
  bool has_hessian_solve() const override { return true; }
  Vector hessian_solve(const Eigen::Ref<const Vector>& a,
                       const Eigen::Ref<const Vector>& rhs) const override;

  Matrix hessian(const Eigen::Ref<const Vector>& a) const;
  const Params& params() const { return params_; }
  /// L2 norm over the domain of the field defined by coefficients a.
  double field_norm_squared(const Eigen::Ref<const Vector>& a) const;

private:
  Params params_;
  Index n_ = 0;
  double weight_ = 0.0;  // quadrature weight per point
  Matrix f_;             // Q x n basis values
  Matrix gx_, gy_;       // Q x n basis gradients
  Vector kappa_, source_;
};

/// z(a) = 1/2 ||Wᵀa - c||² with W an n x 2 orthonormal-column matrix. The
/// gradient lives in span(W), so the flow is exactly rank-2: a stand-in for
/// high-dimensional problems with low-rank optimization dynamics.
class SyntheticLowRankProblem : public Objective {
public:
  SyntheticLowRankProblem(Index n, std::uint64_t seed);

  Index dim() const override { return w_.rows(); }
  double value(const Eigen::Ref<const Vector>& a) const override;
  Vector gradient(const Eigen::Ref<const Vector>& a) const override;

  const Matrix& w() const { return w_; }
  const Vector& c() const { return c_; }

private:
  Matrix w_;
  Vector c_;
};

/// Chained Rosenbrock valley with optional additive Gaussian noise on each
/// gradient component. The noise stream is counter-based: draw i of call j
/// depends only on (seed, j, i), so runs replay exactly under a fixed seed.
class NoisyValleyProblem : public Objective {
public:
  NoisyValleyProblem(Index n, double noise_sigma, std::uint64_t seed);

  Index dim() const override { return n_; }
  double value(const Eigen::Ref<const Vector>& a) const override;
  Vector gradient(const Eigen::Ref<const Vector>& a) const override;
  bool stochastic() const override { return noise_sigma_ > 0.0; }
  bool single_threaded() const override { return noise_sigma_ > 0.0; }

  /// Noise-free gradient (the deterministic base landscape).
  Vector exact_gradient(const Eigen::Ref<const Vector>& a) const;

private:
  Index n_;
  double noise_sigma_;
  std::uint64_t seed_;
  mutable std::uint64_t call_counter_ = 0;
};

struct ProblemSpec {
  std::string kind;
  std::map<std::string, std::string> params;
};

struct ProblemSetup {
  std::shared_ptr<Objective> objective;
  Vector initial_state;
};

/// Builds the named problem with defaults filled in; deterministic given
/// spec + seed. Unknown kinds or parameters are errors.
ProblemSetup make_problem(const ProblemSpec& spec, std::uint64_t seed);

/// Accepted parameter keys (with printable defaults) for a problem kind;
/// used for config validation and the effective-config echo.
std::map<std::string, std::string> problem_param_defaults(
    const std::string& kind);

}  // namespace lgf
