#include "lgf/odeint.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace lgf {

void IntegratorConfig::validate() const {
  if (rtol <= 0.0 || atol <= 0.0) throw Error("integrator: rtol and atol must be positive");
  if (max_steps < 1) throw Error("integrator: max_steps must be >= 1");
  if (initial_step && *initial_step <= 0.0) throw Error("integrator: initial_step must be positive");
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// y5 - y4 error weights.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// Dense-output weights for the 4th-order interpolant.
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

struct DenseSegment {
  double t = 0.0, h = 0.0;
  Vector r1, r2, r3, r4, r5;

  Vector eval(double t_query) const {
    const double theta = (t_query - t) / h;
    const double theta1 = 1.0 - theta;
    return r1 + theta * (r2 + theta1 * (r3 + theta * (r4 + theta1 * r5)));
  }
};

Vector checked_rhs(const OdeRhs& f, double t, const Vector& y, long& evals) {
  if (!all_finite(y)) {
    throw NonFiniteError("integrate: non-finite state at t=" + std::to_string(t), t, y);
  }
  Vector dy = f(t, y);
  ++evals;
  if (dy.size() != y.size()) throw Error("integrate: RHS dimension mismatch");
  if (!all_finite(dy)) throw NonFiniteError("integrate: non-finite RHS at t=" + std::to_string(t), t, y);
  return dy;
}

double error_norm(const Vector& err, const Vector& y5, const Vector& y4, double atol,
                  double rtol) {
  double sum = 0.0;
  for (Index i = 0; i < err.size(); ++i) {
    const double sc = atol + rtol * std::max(std::abs(y5[i]), std::abs(y4[i]));
    const double q = err[i] / sc;
    sum += q * q;
  }
  return std::sqrt(sum / static_cast<double>(err.size()));
}

// Starting-step heuristic in the style of Hairer/Norsett/Wanner.
double initial_step_guess(const OdeRhs& f, double t0, const Vector& y0, const Vector& f0,
                          double t1, double atol, double rtol, long& evals) {
  auto weighted = [&](const Vector& v, const Vector& ref) {
    double sum = 0.0;
    for (Index i = 0; i < v.size(); ++i) {
      const double sc = atol + rtol * std::abs(ref[i]);
      const double q = v[i] / sc;
      sum += q * q;
    }
    return std::sqrt(sum / static_cast<double>(v.size()));
  };
  const double d0 = weighted(y0, y0);
  const double d1 = weighted(f0, y0);
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h0 = std::min(h0, t1 - t0);
  if (h0 <= 0.0) return t1 - t0;

  const Vector y1 = y0 + h0 * f0;
  Vector f1;
  try {
    f1 = checked_rhs(f, t0 + h0, y1, evals);
  } catch (const NonFiniteError&) {
    return std::max(1e-6, (t1 - t0) * 1e-6);  // probe overshot; start tiny
  }
  const double d2 = weighted(f1 - f0, y0) / h0;
  const double dm = std::max(d1, d2);
  double h1 = (dm <= 1e-15) ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
  return std::min({100.0 * h0, h1, t1 - t0});
}

class Reporter {
public:
  Reporter(std::span<const double> times, double t0, double t1) : times_(times) {
    for (double t : times_) {
      if (t < t0 - 1e-12 || t > t1 + 1e-12) {
        throw Error("integrate: report time outside [t0, t1]");
      }
    }
    for (std::size_t i = 1; i < times_.size(); ++i) {
      if (times_[i] < times_[i - 1]) throw Error("integrate: report times must be sorted");
    }
  }

  bool pending() const { return next_ < times_.size(); }
  double next_time() const { return times_[next_]; }

  // Emit every report time that falls at or before t (interpolated), then
  // at the very end exact endpoint values.
  template <typename Eval>
  void drain_through(double t, const Eval& eval, std::vector<Vector>& out) {
    while (pending() && times_[next_] <= t) {
      out.push_back(eval(times_[next_]));
      ++next_;
    }
  }

  void finish(const Vector& y_final, std::vector<Vector>& out) {
    while (pending()) {
      out.push_back(y_final);  // times at (or numerically past) t1
      ++next_;
    }
  }

private:
  std::span<const double> times_;
  std::size_t next_ = 0;
};

IntegrationResult integrate_rk4(const OdeRhs& f, const Vector& y0, double t0, double t1,
                                const IntegratorConfig& cfg,
                                std::span<const double> report_times) {
  if (!cfg.initial_step) throw Error("integrate: Rk4Fixed requires initial_step");
  const double h_fixed = *cfg.initial_step;

  IntegrationResult res;
  res.y = y0;
  Reporter reporter(report_times, t0, t1);
  double t = t0;
  reporter.drain_through(t, [&](double) { return res.y; }, res.reported);

  while (t < t1) {
    if (res.steps >= cfg.max_steps) throw MaxStepsError("integrate: max_steps exceeded", t, res.y);
    double h = std::min(h_fixed, t1 - t);
    if (reporter.pending()) h = std::min(h, reporter.next_time() - t);
    if (h <= 0.0) h = std::min(h_fixed, t1 - t);

    const Vector k1 = checked_rhs(f, t, res.y, res.rhs_evals);
    const Vector k2 = checked_rhs(f, t + 0.5 * h, res.y + 0.5 * h * k1, res.rhs_evals);
    const Vector k3 = checked_rhs(f, t + 0.5 * h, res.y + 0.5 * h * k2, res.rhs_evals);
    const Vector k4 = checked_rhs(f, t + h, res.y + h * k3, res.rhs_evals);
    res.y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t += h;
    ++res.steps;
    if (!all_finite(res.y)) throw NonFiniteError("integrate: non-finite state", t, res.y);
    reporter.drain_through(t, [&](double) { return res.y; }, res.reported);
  }
  reporter.finish(res.y, res.reported);
  return res;
}

IntegrationResult integrate_dopri5(const OdeRhs& f, const Vector& y0, double t0, double t1,
                                   const IntegratorConfig& cfg,
                                   std::span<const double> report_times) {
  IntegrationResult res;
  res.y = y0;
  Reporter reporter(report_times, t0, t1);
  double t = t0;
  reporter.drain_through(t, [&](double) { return res.y; }, res.reported);
  if (t >= t1) {
    reporter.finish(res.y, res.reported);
    return res;
  }

  Vector k1 = checked_rhs(f, t, res.y, res.rhs_evals);
  double h = cfg.initial_step ? std::min(*cfg.initial_step, t1 - t0)
                              : initial_step_guess(f, t0, y0, k1, t1, cfg.atol, cfg.rtol,
                                                   res.rhs_evals);
  h = std::max(h, 1e-300);

  const Index n = y0.size();
  Vector k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), y5(n), y4(n);

  while (t < t1) {
    if (res.steps >= cfg.max_steps) throw MaxStepsError("integrate: max_steps exceeded", t, res.y);
    if (t + 1.01 * h >= t1) h = t1 - t;

    const Vector& y = res.y;
    k2 = checked_rhs(f, t + c2 * h, y + h * (a21 * k1), res.rhs_evals);
    k3 = checked_rhs(f, t + c3 * h, y + h * (a31 * k1 + a32 * k2), res.rhs_evals);
    k4 = checked_rhs(f, t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3), res.rhs_evals);
    k5 = checked_rhs(f, t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4),
                     res.rhs_evals);
    k6 = checked_rhs(f, t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5),
                     res.rhs_evals);
    y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    k7 = checked_rhs(f, t + h, y5, res.rhs_evals);  // FSAL

    const Vector err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    y4 = y5 - err;
    const double norm = error_norm(err, y5, y4, cfg.atol, cfg.rtol);
    ++res.steps;

    if (norm <= 1.0) {
      if (!all_finite(y5)) throw NonFiniteError("integrate: non-finite state", t + h, y5);
      if (reporter.pending() && reporter.next_time() <= t + h) {
        DenseSegment seg;
        seg.t = t;
        seg.h = h;
        seg.r1 = y;
        seg.r2 = y5 - y;
        seg.r3 = h * k1 - seg.r2;
        seg.r4 = seg.r2 - h * k7 - seg.r3;
        seg.r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
        reporter.drain_through(t + h, [&](double tq) { return seg.eval(tq); }, res.reported);
      }
      t += h;
      res.y = y5;
      k1 = k7;
      const double factor =
          (norm == 0.0) ? 10.0 : std::clamp(0.9 * std::pow(norm, -0.2), 0.2, 10.0);
      h *= factor;
    } else {
      h *= std::clamp(0.9 * std::pow(norm, -0.2), 0.2, 1.0);
    }
  }
  reporter.finish(res.y, res.reported);
  return res;
}

}  // namespace

IntegrationResult integrate(const OdeRhs& f, const Vector& y0, double t0, double t1,
                            const IntegratorConfig& cfg, std::span<const double> report_times) {
  cfg.validate();
  if (t1 < t0) throw Error("integrate: t1 must be >= t0");
  if (!all_finite(y0)) throw NonFiniteError("integrate: non-finite initial state", t0, y0);

  if (t1 == t0) {
    IntegrationResult res;
    res.y = y0;
    Reporter reporter(report_times, t0, t1);
    reporter.finish(y0, res.reported);
    return res;
  }
  return cfg.method == OdeMethod::Rk4Fixed ? integrate_rk4(f, y0, t0, t1, cfg, report_times)
                                           : integrate_dopri5(f, y0, t0, t1, cfg, report_times);
}

AdamIntegrationResult integrate_adam_system(const GradientSurrogate& f_hat,
                                            const AdamOdeState& s0, double t1,
                                            const AdamParams& params, const IntegratorConfig& cfg,
                                            std::span<const double> report_times) {
  params.validate();
  if (s0.t <= 0.0) throw Error("integrate_adam_system: start time must be positive");
  const Index n = s0.a.size();
  if (s0.m.size() != n || s0.v.size() != n) {
    throw Error("integrate_adam_system: state component sizes differ");
  }

  Vector y0(3 * n);
  y0 << s0.a, s0.m, s0.v;

  const double inv_eta = 1.0 / params.eta;
  OdeRhs rhs = [&](double t, const Vector& y) {
    const auto a = y.head(n);
    const auto m = y.segment(n, n);
    const auto v = y.tail(n);
    const Vector g = f_hat(a);

    const double bias1 = 1.0 - std::pow(params.beta1, t * inv_eta);
    const double bias2 = 1.0 - std::pow(params.beta2, t * inv_eta);

    Vector dy(3 * n);
    // v can dip slightly negative under adaptive stepping; clamp before sqrt.
    const Vector v_hat = (v.cwiseMax(0.0) / bias2).cwiseSqrt().array() + params.epsilon;
    dy.head(n) = -(m / bias1).cwiseQuotient(v_hat);
    dy.segment(n, n) = inv_eta * (1.0 - params.beta1) * (g - m);
    dy.tail(n) = inv_eta * (1.0 - params.beta2) * (g.cwiseProduct(g) - v);
    return dy;
  };

  IntegrationResult raw = integrate(rhs, y0, s0.t, t1, cfg, report_times);

  AdamIntegrationResult res;
  res.state.a = raw.y.head(n);
  res.state.m = raw.y.segment(n, n);
  res.state.v = raw.y.tail(n).cwiseMax(0.0);
  res.state.t = t1;
  res.steps = raw.steps;
  res.rhs_evals = raw.rhs_evals;
  res.reported_a.reserve(raw.reported.size());
  for (const Vector& y : raw.reported) res.reported_a.push_back(y.head(n));
  return res;
}

AdamOdeState semi_implicit_adam_step(const AdamOdeState& s, const Eigen::Ref<const Vector>& g,
                                     long k, const AdamParams& params) {
  params.validate();
  if (k < 0) throw Error("semi_implicit_adam_step: k must be >= 0");
  if (!all_finite(g)) throw Error("semi_implicit_adam_step: non-finite gradient");

  // Forward Euler for the moments with step eta: the 1/eta rates cancel and
  // m + (1-b1)(g - m) simplifies to the recursion below (same algebra; this
  // ordering avoids the cancellation the expanded form suffers).
  AdamOdeState next;
  next.m = params.beta1 * s.m + (1.0 - params.beta1) * g;
  next.v = params.beta2 * s.v + (1.0 - params.beta2) * g.cwiseProduct(g);
  next.t = s.t + params.eta;

  // Backward Euler for a, evaluated at t_{k+1}: the bias exponents are k+1.
  const double bias1 = 1.0 - std::pow(params.beta1, static_cast<double>(k + 1));
  const double bias2 = 1.0 - std::pow(params.beta2, static_cast<double>(k + 1));
  const Vector denom = (next.v / bias2).cwiseSqrt().array() + params.epsilon;
  next.a = s.a - params.eta * (next.m / bias1).cwiseQuotient(denom);
  return next;
}

}  // namespace lgf
