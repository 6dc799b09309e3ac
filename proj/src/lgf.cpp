#include "lgf/lgf.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace lgf {

void LgfConfig::validate() const {
  if (eta <= 0.0) throw Error("lgf: eta must be positive");
  if (history_size < min_history_for(fd_scheme)) {
    throw Error("lgf: history_size must be >= " + std::to_string(min_history_for(fd_scheme)) +
                " for the chosen finite-difference scheme");
  }
  if (retrain_interval < history_size) throw Error("lgf: M >= K required (retrain_interval >= history_size)");
  if (poly_order < 0) throw Error("lgf: poly_order must be >= 0");
  if (epochs < history_size) throw Error("lgf: epochs must cover at least one history window (epochs >= K)");
  if (truncation_rank && *truncation_rank < 1) throw Error("lgf: truncation_rank must be >= 1");
  if (record_every < 1) throw Error("lgf: record_every must be >= 1");
  stlsq.validate();
  integrator.validate();
  AdamParams adam_check = adam;
  adam_check.eta = eta;
  adam_check.validate();
}

void LgfConfig::validate_for_dim(Index n) const {
  validate();
  if (truncation_rank && *truncation_rank > std::min<Index>(n, history_size)) {
    throw Error("lgf: truncation_rank must be <= min(n, history_size)");
  }
}

double acceleration(long history_size, long retrain_interval) {
  if (history_size < 1 || retrain_interval < history_size) {
    throw Error("acceleration: need M >= K >= 1");
  }
  return 100.0 * (static_cast<double>(retrain_interval) / static_cast<double>(history_size) - 1.0);
}

namespace {

struct StepContext {
  const Objective& obj;
  const LgfConfig& cfg;
  AdamParams adam;  // cfg.adam with eta filled in

  explicit StepContext(const Objective& objective, const LgfConfig& config)
      : obj(objective), cfg(config), adam(config.adam) {
    adam.eta = config.eta;
  }
};

// One true-optimizer epoch. `gradient_out`, when non-null, receives the
// gradient evaluated at the pre-step state (ADAM records it for fitting).
void true_step(StepContext& ctx, Vector& a, std::optional<AdamOdeState>& carry, long epoch_index,
               long& grad_evals, long& hess_solves, Vector* gradient_out) {
  switch (ctx.cfg.mode) {
    case OptMode::GradientDescent:
      a = gd_step(ctx.obj, a, ctx.cfg.eta);
      ++grad_evals;
      break;
    case OptMode::Newton:
      a = newton_step(ctx.obj, a, ctx.cfg.eta);
      ++grad_evals;
      ++hess_solves;
      break;
    case OptMode::Adam: {
      if (!carry) {
        carry = AdamOdeState{Vector(), Vector::Zero(a.size()), Vector::Zero(a.size()), 0.0};
      }
      const Vector g = ctx.obj.gradient(a);
      ++grad_evals;
      if (gradient_out) *gradient_out = g;
      AdamState s;
      s.a = a;
      s.m = carry->m;
      s.v = carry->v;
      s.k = epoch_index;  // completed epochs so far; bias exponents use k+1
      s = adam_step_with_gradient(g, s, ctx.adam);
      a = s.a;
      carry->m = std::move(s.m);
      carry->v = std::move(s.v);
      carry->t = ctx.cfg.eta * static_cast<double>(epoch_index + 1);
      break;
    }
  }
}

SurrogateModel fit_surrogate(const StepContext& ctx, const TrajectoryHistory& history) {
  const LgfConfig& cfg = ctx.cfg;
  if (cfg.truncation_rank) {
    return fit_latent_dynamics(history, *cfg.truncation_rank, cfg.poly_order, cfg.fd_scheme,
                               cfg.stlsq);
  }
  const CandidateLibrary lib = build_library(static_cast<int>(history.dim()), cfg.poly_order);
  if (cfg.mode == OptMode::Adam) return fit_gradient_model(history, lib, cfg.stlsq);
  return fit_state_dynamics(history, lib, cfg.fd_scheme, cfg.stlsq);
}

}  // namespace

CycleResult run_cycle(const Objective& obj, const Vector& a_in, const LgfConfig& cfg,
                      std::optional<AdamOdeState> carry, long epoch_offset, long horizon) {
  cfg.validate_for_dim(a_in.size());
  if (horizon < 0) horizon = cfg.retrain_interval;
  if (horizon < 1) throw Error("run_cycle: horizon must be >= 1");

  StepContext ctx(obj, cfg);
  const Index n = a_in.size();
  const long n_true = std::min<long>(cfg.history_size, horizon);
  const long n_surrogate = horizon - n_true;

  CycleResult result;
  result.states.resize(horizon, n);
  result.phases.assign(static_cast<std::size_t>(horizon), Phase::True);
  result.carry = std::move(carry);

  const bool full_window = n_true == cfg.history_size && n_surrogate > 0;
  const bool adam = cfg.mode == OptMode::Adam;

  // Data phase. ADAM pairs each recorded state with the gradient evaluated
  // there; GD/Newton record the post-step states so the window ends at the
  // integration initial condition.
  Matrix window(full_window ? cfg.history_size : 0, n);
  Matrix grad_window(full_window && adam ? cfg.history_size : 0, n);

  Vector a = a_in;
  Vector g_at_state;
  for (long k = 0; k < n_true; ++k) {
    if (full_window && adam) window.row(k) = a;
    true_step(ctx, a, result.carry, epoch_offset + k, result.true_gradient_evals,
              result.true_hessian_solves, full_window && adam ? &g_at_state : nullptr);
    if (full_window && adam) grad_window.row(k) = g_at_state;
    if (full_window && !adam) window.row(k) = a;
    result.states.row(k) = a;
  }

  if (n_surrogate == 0) {
    result.state = std::move(a);
    return result;
  }

  const double t_start = cfg.eta * static_cast<double>(epoch_offset + n_true);
  const double t_end = cfg.eta * static_cast<double>(epoch_offset + horizon);
  const double window_t0 = adam ? cfg.eta * static_cast<double>(epoch_offset)
                                : cfg.eta * static_cast<double>(epoch_offset + 1);

  std::vector<double> report_times(static_cast<std::size_t>(n_surrogate));
  for (long j = 0; j < n_surrogate; ++j) {
    report_times[static_cast<std::size_t>(j)] =
        cfg.eta * static_cast<double>(epoch_offset + n_true + 1 + j);
  }

  auto fallback_to_true = [&](long completed_surrogate, const std::string& why) {
    result.warnings.push_back("cycle at epoch " + std::to_string(epoch_offset) +
                              ": surrogate discarded (" + why + "); completing with true steps");
    for (long k = n_true + completed_surrogate; k < horizon; ++k) {
      true_step(ctx, a, result.carry, epoch_offset + k, result.true_gradient_evals,
                result.true_hessian_solves, nullptr);
      result.states.row(k) = a;
      result.phases[static_cast<std::size_t>(k)] = Phase::True;
    }
    result.state = std::move(a);
  };

  try {
    TrajectoryHistory history = TrajectoryHistory::uniform(
        std::move(window), cfg.eta, window_t0,
        adam ? std::optional<Matrix>(std::move(grad_window)) : std::nullopt);
    SurrogateModel model = fit_surrogate(ctx, history);
    if (model.empty_active_set) {
      result.warnings.push_back("cycle at epoch " + std::to_string(epoch_offset) +
                                ": thresholding removed every term for some output; "
                                "surrogate holds that component fixed");
    }

    IntegratorConfig icfg = cfg.integrator;
    if (icfg.method == OdeMethod::Rk4Fixed && !icfg.initial_step) icfg.initial_step = cfg.eta;

    if (adam) {
      AdamOdeState s0;
      s0.a = a;
      s0.m = result.carry->m;
      s0.v = result.carry->v;
      s0.t = t_start;
      GradientSurrogate f_hat = [&model](const Vector& state) { return predict_rhs(model, state); };
      AdamIntegrationResult out =
          integrate_adam_system(f_hat, s0, t_end, ctx.adam, icfg, report_times);
      for (long j = 0; j < n_surrogate; ++j) {
        result.states.row(n_true + j) = out.reported_a[static_cast<std::size_t>(j)];
        result.phases[static_cast<std::size_t>(n_true + j)] = Phase::Surrogate;
      }
      a = out.state.a;
      result.carry->m = std::move(out.state.m);
      result.carry->v = std::move(out.state.v);
      result.carry->t = t_end;
    } else {
      OdeRhs rhs = [&model](double, const Vector& state) { return predict_rhs(model, state); };
      IntegrationResult out = integrate(rhs, a, t_start, t_end, icfg, report_times);
      for (long j = 0; j < n_surrogate; ++j) {
        result.states.row(n_true + j) = out.reported[static_cast<std::size_t>(j)];
        result.phases[static_cast<std::size_t>(n_true + j)] = Phase::Surrogate;
      }
      a = out.y;
    }
    result.state = std::move(a);
  } catch (const NonFiniteError& err) {
    if (cfg.on_nonfinite == NonFinitePolicy::Error) throw;
    fallback_to_true(0, err.what());
  }

  return result;
}

namespace {

RunReport run_driver(const Objective& obj, const Vector& a0, const LgfConfig& cfg,
                     bool surrogate_enabled) {
  cfg.validate_for_dim(a0.size());
  if (!all_finite(a0)) throw Error("run: non-finite initial state");

  RunReport report;
  report.acceleration_percent = acceleration(cfg.history_size, cfg.retrain_interval);
  report.phase_history.reserve(static_cast<std::size_t>(cfg.epochs));

  const Index n = a0.size();
  std::vector<long> logged;
  std::vector<Vector> logged_states;
  auto should_log = [&](long epoch) {
    return epoch == 0 || epoch == cfg.epochs || epoch % cfg.record_every == 0;
  };
  auto log_epoch = [&](long epoch, const Vector& state, bool surrogate_phase) {
    if (!should_log(epoch)) return;
    logged.push_back(epoch);
    logged_states.push_back(state);
    double loss = std::numeric_limits<double>::quiet_NaN();
    if (!surrogate_phase || cfg.log_surrogate_loss) loss = obj.value(state);
    report.loss_history.push_back(loss);
    report.grad_eval_history.push_back(report.true_gradient_evals);
  };

  Vector a = a0;
  log_epoch(0, a, false);

  auto finalize = [&](RunReport& rep, const Vector& terminal) {
    rep.terminal_state = terminal;
    rep.logged_epochs = logged;
    rep.trajectory.resize(static_cast<Index>(logged_states.size()), n);
    for (std::size_t i = 0; i < logged_states.size(); ++i) {
      rep.trajectory.row(static_cast<Index>(i)) = logged_states[i].transpose();
    }
  };

  std::optional<AdamOdeState> carry;
  long epoch = 0;
  try {
  while (epoch < cfg.epochs) {
    const long remaining = cfg.epochs - epoch;
    long horizon;
    if (!surrogate_enabled) {
      horizon = remaining;  // pure base optimizer: one all-true "cycle"
    } else if (remaining <= cfg.history_size) {
      horizon = remaining;  // too few epochs left to fit; run them true
    } else {
      horizon = std::min<long>(cfg.retrain_interval, remaining);
    }

    CycleResult cycle;
    if (surrogate_enabled) {
      cycle = run_cycle(obj, a, cfg, std::move(carry), epoch, horizon);
    } else {
      // Same true-step code path, no fitting and no integration.
      StepContext ctx(obj, cfg);
      cycle.states.resize(horizon, n);
      cycle.phases.assign(static_cast<std::size_t>(horizon), Phase::True);
      cycle.carry = std::move(carry);
      Vector state = a;
      for (long k = 0; k < horizon; ++k) {
        true_step(ctx, state, cycle.carry, epoch + k, cycle.true_gradient_evals,
                  cycle.true_hessian_solves, nullptr);
        cycle.states.row(k) = state;
      }
      cycle.state = std::move(state);
    }

    // Every true epoch costs exactly one gradient evaluation (plus one
    // Hessian solve in Newton mode); replay the phases so the per-epoch
    // logs carry exact cumulative counts.
    const long evals_before = report.true_gradient_evals;
    const long hess_before = report.true_hessian_solves;
    long seen_true = 0;
    for (long k = 0; k < horizon; ++k) {
      const bool is_true = cycle.phases[static_cast<std::size_t>(k)] == Phase::True;
      if (is_true) ++seen_true;
      report.phase_history.push_back(cycle.phases[static_cast<std::size_t>(k)]);
      report.true_gradient_evals = evals_before + seen_true;
      if (cfg.mode == OptMode::Newton) report.true_hessian_solves = hess_before + seen_true;
      log_epoch(epoch + k + 1, cycle.states.row(k).transpose(), !is_true);
    }
    report.true_gradient_evals = evals_before + cycle.true_gradient_evals;
    report.true_hessian_solves = hess_before + cycle.true_hessian_solves;

    for (auto& w : cycle.warnings) report.warnings.push_back(std::move(w));
    a = std::move(cycle.state);
    carry = std::move(cycle.carry);
    epoch += horizon;
  }
  } catch (Error& e) {
    finalize(report, a);
    report.warnings.push_back(std::string("run aborted at epoch ") + std::to_string(epoch) +
                              ": " + e.what());
    e.attach_partial_report(std::make_shared<RunReport>(std::move(report)));
    throw;
  }

  finalize(report, a);
  return report;
}

}  // namespace

RunReport run_lgf(const Objective& obj, const Vector& a0, const LgfConfig& cfg) {
  return run_driver(obj, a0, cfg, true);
}

RunReport run_baseline(const Objective& obj, const Vector& a0, const LgfConfig& cfg) {
  return run_driver(obj, a0, cfg, false);
}

}  // namespace lgf
