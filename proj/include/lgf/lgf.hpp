#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lgf/odeint.hpp"
#include "lgf/optim.hpp"
#include "lgf/sindy.hpp"

namespace lgf {

enum class OptMode { GradientDescent, Newton, Adam };
enum class NonFinitePolicy { Error, FallbackToTrue };
enum class Phase : std::uint8_t { True, Surrogate };

struct LgfConfig {
  OptMode mode = OptMode::GradientDescent;
  double eta = 1e-2;
  int history_size = 10;      ///< K: true steps (= recorded samples) per cycle
  int retrain_interval = 30;  ///< M: total epochs per cycle
  int poly_order = 1;         ///< P: library total degree
  std::optional<int> truncation_rank;
  long epochs = 100;
  FdScheme fd_scheme = FdScheme::Centered2;
  StlsqConfig stlsq;
  IntegratorConfig integrator;
  AdamParams adam;  ///< beta1/beta2/epsilon; the step is always `eta`
  NonFinitePolicy on_nonfinite = NonFinitePolicy::Error;
  long record_every = 1;          ///< thins logging, never the dynamics
  bool log_surrogate_loss = true; ///< evaluate z during surrogate phases

  void validate() const;
  /// Checks the parts that need the problem dimension (r <= min(n, K)).
  void validate_for_dim(Index n) const;
};

struct RunReport {
  std::vector<long> logged_epochs;       ///< includes epoch 0 and the final epoch
  Matrix trajectory;                     ///< one row per logged epoch
  std::vector<double> loss_history;      ///< per logged epoch (NaN if not evaluated)
  std::vector<long> grad_eval_history;   ///< cumulative count per logged epoch
  std::vector<Phase> phase_history;      ///< one entry per epoch 1..epochs
  long true_gradient_evals = 0;
  long true_hessian_solves = 0;
  double acceleration_percent = 0.0;
  Vector terminal_state;
  std::vector<std::string> warnings;
};

/// 100 * (M/K - 1): surrogate epochs gained per true gradient evaluation.
double acceleration(long history_size, long retrain_interval);

struct CycleResult {
  Vector state;
  std::optional<AdamOdeState> carry;  ///< ADAM moments continuing across cycles
  Matrix states;                      ///< per-epoch states within the cycle
  std::vector<Phase> phases;
  long true_gradient_evals = 0;
  long true_hessian_solves = 0;
  std::vector<std::string> warnings;
};

/// One [K true steps][horizon-K surrogate epochs] cycle from a_in.
/// `horizon` defaults to the retrain interval; the final partial cycle of a
/// run passes something smaller. With horizon <= K only true steps run and
/// no surrogate is fitted. `epoch_offset` anchors pseudo-time t = epoch*eta;
/// `carry` holds the ADAM (m, v, t) entering the cycle.
CycleResult run_cycle(const Objective& obj, const Vector& a_in,
                      const LgfConfig& cfg,
                      std::optional<AdamOdeState> carry = std::nullopt,
                      long epoch_offset = 0, long horizon = -1);

/// Scheduled-retraining outer loop over run_cycle until the epoch budget is
/// spent. ADAM moments flow across cycle boundaries without resets.
RunReport run_lgf(const Objective& obj, const Vector& a0, const LgfConfig& cfg);

/// The pure base optimizer under the same budget and logging. Shares the
/// stepping code with the true phase of run_lgf, so an M = K run reproduces
/// it bit for bit.
RunReport run_baseline(const Objective& obj, const Vector& a0,
                       const LgfConfig& cfg);

}  // namespace lgf
