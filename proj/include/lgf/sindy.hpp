#pragma once

#include <optional>

#include "lgf/polylib.hpp"
#include "lgf/reduction.hpp"

namespace lgf {

enum class FdScheme { Forward, Centered2, Centered4 };

/// Smallest window size the stencil supports.
int min_history_for(FdScheme scheme);

/// Rolling window of optimizer iterates sampled at uniform pseudo-time
/// spacing eta. Gradient samples ride along in ADAM mode only.
struct TrajectoryHistory {
  Matrix states;  ///< K x n
  Vector times;   ///< strictly increasing, spacing eta
  std::optional<Matrix> gradients;
  double eta = 0.0;

  static TrajectoryHistory uniform(Matrix states, double eta, double t0 = 0.0,
                                   std::optional<Matrix> gradients = std::nullopt);

  Index samples() const { return states.rows(); }
  Index dim() const { return states.cols(); }
  void validate() const;
};

struct StlsqConfig {
  double alpha = 1e-6;
  double threshold = 1e-8;
  int max_iter = 20;
  bool unbias = true;
  bool normalize_columns = true;

  void validate() const;
};

enum class TargetKind { StateDerivative, Gradient };

/// Fitted surrogate f̂(a) = Ξᵀ φ(a), optionally composed with a reduction
/// basis as U Ξ̃ᵀ φ̃(Uᵀ a).
struct SurrogateModel {
  CandidateLibrary library;
  Matrix xi;  ///< p x m coefficients
  std::optional<ReducedBasis> basis;
  TargetKind target_kind = TargetKind::StateDerivative;
  bool empty_active_set = false;  ///< some output column lost every term

  Index output_dim() const { return xi.cols(); }
};

/// Finite-difference derivative estimates with spacing eta. Interior rows
/// use the requested stencil; boundary rows use one-sided stencils of the
/// same order, so polynomial trajectories up to the stencil order are
/// differentiated exactly at every row.
Matrix estimate_derivatives(const TrajectoryHistory& history, FdScheme scheme);

struct StlsqResult {
  Matrix coefficients;  ///< p x m
  bool empty_active_set = false;
};

/// Sequentially thresholded least squares. Columns of phi are normalized to
/// unit 2-norm (zero columns are excluded and forced to zero coefficients),
/// the active set is ridge-solved and pruned at `threshold` in normalized
/// coordinates until stable or max_iter, then optionally re-solved once with
/// alpha = 0 before the scaling is undone.
StlsqResult stlsq_fit(const Eigen::Ref<const Matrix>& phi,
                      const Eigen::Ref<const Matrix>& target,
                      const StlsqConfig& cfg);

SurrogateModel fit_state_dynamics(const TrajectoryHistory& history,
                                  const CandidateLibrary& lib, FdScheme scheme,
                                  const StlsqConfig& cfg);

/// Fits the recorded gradients directly (no differentiation step).
SurrogateModel fit_gradient_model(const TrajectoryHistory& history,
                                  const CandidateLibrary& lib,
                                  const StlsqConfig& cfg);

/// Projects the window onto a rank-r SVD basis and fits the dynamics (or
/// the projected gradients, when the history carries them) in latent space.
SurrogateModel fit_latent_dynamics(const TrajectoryHistory& history, int r,
                                   int degree, FdScheme scheme,
                                   const StlsqConfig& cfg);

Vector predict_rhs(const SurrogateModel& model,
                   const Eigen::Ref<const Vector>& a);

}  // namespace lgf
