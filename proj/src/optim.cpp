#include "lgf/optim.hpp"

#include <cmath>
#include <string>

namespace lgf {

Vector Objective::hessian_solve(const Eigen::Ref<const Vector>&,
                                const Eigen::Ref<const Vector>&) const {
  throw Error("objective does not provide hessian_solve");
}

void AdamParams::validate() const {
  if (beta1 < 0.0 || beta1 >= 1.0) throw Error("adam: beta1 must be in [0, 1)");
  if (beta2 < 0.0 || beta2 >= 1.0) throw Error("adam: beta2 must be in [0, 1)");
  if (epsilon <= 0.0) throw Error("adam: epsilon must be positive");
  if (eta <= 0.0) throw Error("adam: eta must be positive");
}

Vector gd_step(const Objective& obj, const Eigen::Ref<const Vector>& a, double eta) {
  if (eta <= 0.0) throw Error("gd_step: eta must be positive");
  const Vector g = obj.gradient(a);
  if (!all_finite(g)) throw Error("gd_step: non-finite gradient");
  return a - eta * g;
}

Vector newton_step(const Objective& obj, const Eigen::Ref<const Vector>& a, double eta) {
  if (eta <= 0.0) throw Error("newton_step: eta must be positive");
  if (!obj.has_hessian_solve()) throw Error("newton_step: objective has no hessian_solve");
  const Vector g = obj.gradient(a);
  if (!all_finite(g)) throw Error("newton_step: non-finite gradient");
  const Vector direction = obj.hessian_solve(a, g);
  if (!all_finite(direction)) throw Error("newton_step: non-finite Newton direction");
  return a - eta * direction;
}

AdamState AdamState::fresh(Vector a0) {
  AdamState s;
  s.m = Vector::Zero(a0.size());
  s.v = Vector::Zero(a0.size());
  s.a = std::move(a0);
  s.k = 0;
  return s;
}

AdamState adam_step_with_gradient(const Eigen::Ref<const Vector>& g, const AdamState& s,
                                  const AdamParams& params) {
  params.validate();
  if (s.k < 0) throw Error("adam_step: iteration index must be >= 0");
  if (!all_finite(g)) throw Error("adam_step: non-finite gradient");

  AdamState next;
  next.m = params.beta1 * s.m + (1.0 - params.beta1) * g;
  next.v = params.beta2 * s.v + (1.0 - params.beta2) * g.cwiseProduct(g);
  next.k = s.k + 1;

  const double bias1 = 1.0 - std::pow(params.beta1, static_cast<double>(s.k + 1));
  const double bias2 = 1.0 - std::pow(params.beta2, static_cast<double>(s.k + 1));
  const Vector denom = (next.v / bias2).cwiseSqrt().array() + params.epsilon;
  next.a = s.a - params.eta * (next.m / bias1).cwiseQuotient(denom);
  return next;
}

AdamState adam_step(const Objective& obj, const AdamState& s, const AdamParams& params) {
  return adam_step_with_gradient(obj.gradient(s.a), s, params);
}

}  // namespace lgf
