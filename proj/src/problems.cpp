#include "lgf/problems.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

namespace lgf {

namespace {

constexpr double kPi = std::numbers::pi;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Deterministic uniform/normal draws on top of the (bit-exact) mt19937_64
// engine; avoids the implementation-defined std distributions.
class RandomStream {
public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  double uniform() {  // [0, 1)
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    spare_ = radius * std::sin(2.0 * kPi * u2);
    have_spare_ = true;
    return radius * std::cos(2.0 * kPi * u2);
  }

  Vector normal_vector(Index n) {
    Vector v(n);
    for (Index i = 0; i < n; ++i) v[i] = normal();
    return v;
  }

private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// sin(m * pi / 2) for integer m, exactly.
int sin_half_pi(long m) {
  const long r = ((m % 4) + 4) % 4;
  if (r == 1) return 1;
  if (r == 3) return -1;
  return 0;
}

}  // namespace

// ---------------------------------------------------------------------------
// QuadraticProblem

QuadraticProblem::QuadraticProblem(Matrix q, Vector b) : q_(std::move(q)), b_(std::move(b)) {
  if (q_.rows() != q_.cols()) throw Error("quadratic: Q must be square");
  if (b_.size() != q_.rows()) throw Error("quadratic: b length must match Q");
  if ((q_ - q_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, q_.cwiseAbs().maxCoeff())) {
    throw Error("quadratic: Q must be symmetric");
  }
  llt_.compute(q_);
  if (llt_.info() != Eigen::Success) throw Error("quadratic: Q must be positive definite");
}

double QuadraticProblem::value(const Eigen::Ref<const Vector>& a) const {
  return 0.5 * a.dot(q_ * a) - b_.dot(a);
}

Vector QuadraticProblem::gradient(const Eigen::Ref<const Vector>& a) const {
  return q_ * a - b_;
}

Vector QuadraticProblem::hessian_solve(const Eigen::Ref<const Vector>&,
                                       const Eigen::Ref<const Vector>& rhs) const {
  return llt_.solve(rhs);
}

Vector QuadraticProblem::minimizer() const { return llt_.solve(b_); }

// ---------------------------------------------------------------------------
// HeatInverseProblem

HeatInverseProblem::HeatInverseProblem(Params params) : params_(params) {
  const int n = params_.n_modes;
  if (n < 2) throw Error("heat_inverse: need at least 2 modes (the source drives mode 2)");
  if (params_.dt <= 0.0 || params_.horizon <= 0.0) throw Error("heat_inverse: dt and horizon must be positive");
  if (params_.a_true[0] <= 0.0 || params_.a_true[1] <= 0.0) throw Error("heat_inverse: a_true must be positive");
  n_steps_ = static_cast<int>(std::lround(params_.horizon / params_.dt));
  if (n_steps_ < 2) throw Error("heat_inverse: horizon must cover at least 2 steps");

  // Stiffness split at x = 1/2 for piecewise-constant conductivity. The
  // cosine-product integrals have closed forms; sin(k*pi) terms vanish
  // exactly, so the diagonal halves are 1/4 and off-diagonal halves are
  // equal and opposite.
  k1_.resize(n, n);
  k2_.resize(n, n);
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) {
      double c1;
      if (i == j) {
        c1 = 0.25;
      } else {
        c1 = sin_half_pi(i - j) / (2.0 * kPi * (i - j)) + sin_half_pi(i + j) / (2.0 * kPi * (i + j));
      }
      const double scale = static_cast<double>(i) * static_cast<double>(j) * kPi * kPi;
      k1_(i - 1, j - 1) = scale * c1;
      k2_(i - 1, j - 1) = (i == j) ? scale * 0.25 : -scale * c1;
    }
  }

  measurement_ = forward_solve(params_.a_true);
}

Matrix HeatInverseProblem::stiffness(const Eigen::Ref<const Vector>& a) const {
  return a[0] * k1_ + a[1] * k2_;
}

Matrix HeatInverseProblem::forward_solve(const Eigen::Ref<const Vector>& a) const {
  if (a.size() != 2) throw Error("heat_inverse: expected 2 parameters");
  if (a[0] <= 0.0 || a[1] <= 0.0) throw Error("heat_inverse: conductivities must be positive");

  const int n = params_.n_modes;
  const double dt = params_.dt;
  const double mass = 0.5;  // sine-basis mass matrix is diagonal 1/2

  Matrix system = stiffness(a);
  system.diagonal().array() += mass / dt;
  Eigen::LLT<Matrix> llt(system);
  if (llt.info() != Eigen::Success) throw Error("heat_inverse: time-step system not SPD");

  Matrix u(n_steps_ + 1, n);
  u.row(0).setZero();
  Vector rhs(n);
  for (int k = 0; k < n_steps_; ++k) {
    const double t_next = dt * static_cast<double>(k + 1);
    rhs = (mass / dt) * u.row(k).transpose();
    rhs[1] += 0.5 * params_.source_amplitude * std::sin(2.0 * kPi * t_next);  // projected source, mode 2
    u.row(k + 1) = llt.solve(rhs).transpose();
  }
  return u;
}

void HeatInverseProblem::objective_and_gradient(const Eigen::Ref<const Vector>& a, double* z,
                                                Vector* grad) const {
  if (a.size() != 2) throw Error("heat_inverse: expected 2 parameters");
  if (a[0] <= 0.0 || a[1] <= 0.0) throw Error("heat_inverse: conductivities must be positive");

  const int n = params_.n_modes;
  const double dt = params_.dt;
  const double mass = 0.5;

  Matrix system = stiffness(a);
  system.diagonal().array() += mass / dt;
  Eigen::LLT<Matrix> llt(system);
  if (llt.info() != Eigen::Success) throw Error("heat_inverse: time-step system not SPD");

  Vector u = Vector::Zero(n);
  Vector s1 = Vector::Zero(n);  // du/da1, propagated alongside u
  Vector s2 = Vector::Zero(n);
  double acc_z = 0.0;
  Vector acc_g = Vector::Zero(2);

  Vector rhs(n);
  for (int k = 0; k < n_steps_; ++k) {
    const double t_next = dt * static_cast<double>(k + 1);
    rhs = (mass / dt) * u;
    rhs[1] += 0.5 * params_.source_amplitude * std::sin(2.0 * kPi * t_next);
    const Vector u_next = llt.solve(rhs);
    if (grad) {
      s1 = llt.solve(((mass / dt) * s1 - k1_ * u_next).eval());
      s2 = llt.solve(((mass / dt) * s2 - k2_ * u_next).eval());
    }
    u = u_next;

    // z = 1/4 * integral of sum_i (u_i - v_i)^2 dt, trapezoid in time; the
    // t = 0 term vanishes (both trajectories start at zero).
    const double w = (k + 1 == n_steps_) ? 0.5 * dt : dt;
    const Vector err = u - measurement_.row(k + 1).transpose();
    acc_z += 0.25 * w * err.squaredNorm();
    if (grad) {
      acc_g[0] += 0.5 * w * err.dot(s1);
      acc_g[1] += 0.5 * w * err.dot(s2);
    }
  }
  if (z) *z = acc_z;
  if (grad) *grad = acc_g;
}

double HeatInverseProblem::value(const Eigen::Ref<const Vector>& a) const {
  double z = 0.0;
  objective_and_gradient(a, &z, nullptr);
  return z;
}

Vector HeatInverseProblem::gradient(const Eigen::Ref<const Vector>& a) const {
  Vector g(2);
  objective_and_gradient(a, nullptr, &g);
  return g;
}

// ---------------------------------------------------------------------------
// PlaplaceProblem

PlaplaceProblem::PlaplaceProblem(Params params) : params_(params) {
  const int m = params_.modes_per_dim;
  const int q = params_.quad_per_dim;
  if (m < 1) throw Error("plaplace: modes_per_dim must be >= 1");
  if (params_.p_nl < 1) throw Error("plaplace: p_nl must be >= 1");
  if (q < 2) throw Error("plaplace: quad_per_dim must be >= 2");

  n_ = static_cast<Index>(m) * m;
  const Index nq = static_cast<Index>(q) * q;
  const double h = 1.0 / q;
  weight_ = h * h;  // midpoint rule on the unit square

  // Separable tables keep the basis fill cheap: values and derivatives of
  // sin(i pi x) at the q midpoints, per mode.
  Matrix sx(q, m), cx(q, m);
  for (int iq = 0; iq < q; ++iq) {
    const double x = (iq + 0.5) * h;
    for (int i = 1; i <= m; ++i) {
      sx(iq, i - 1) = std::sin(i * kPi * x);
      cx(iq, i - 1) = i * kPi * std::cos(i * kPi * x);
    }
  }

  f_.resize(nq, n_);
  gx_.resize(nq, n_);
  gy_.resize(nq, n_);
  kappa_.resize(nq);
  source_.resize(nq);
  for (int qx = 0; qx < q; ++qx) {
    const double x1 = (qx + 0.5) * h;
    for (int qy = 0; qy < q; ++qy) {
      const double x2 = (qy + 0.5) * h;
      const Index row = static_cast<Index>(qx) * q + qy;
      const bool inside = std::max(std::abs(x1 - 0.5), std::abs(x2 - 0.5)) <= 0.25;
      kappa_[row] = inside ? 20.0 : 1.0;
      source_[row] = 1e7 * x1 * std::sin(4.0 * kPi * x1) * std::sin(3.0 * kPi * x2);
      for (int i = 1; i <= m; ++i) {
        for (int j = 1; j <= m; ++j) {
          const Index col = static_cast<Index>(i - 1) * m + (j - 1);
          f_(row, col) = sx(qx, i - 1) * sx(qy, j - 1);
          gx_(row, col) = cx(qx, i - 1) * sx(qy, j - 1);
          gy_(row, col) = sx(qx, i - 1) * cx(qy, j - 1);
        }
      }
    }
  }
}

namespace {

// s^e for integer e >= 0, elementwise by repeated multiplication.
Vector int_power(const Vector& s, int e) {
  Vector out = Vector::Ones(s.size());
  for (int i = 0; i < e; ++i) out = out.cwiseProduct(s);
  return out;
}

}  // namespace

double PlaplaceProblem::value(const Eigen::Ref<const Vector>& a) const {
  if (a.size() != n_) throw Error("plaplace: state dimension mismatch");
  if (!all_finite(a)) throw Error("plaplace: non-finite state");

  const Vector u = f_ * a;
  const Vector ux = gx_ * a;
  const Vector uy = gy_ * a;
  const Vector s = ux.cwiseProduct(ux) + uy.cwiseProduct(uy);  // grad u . grad u >= 0

  const Vector u2 = u.cwiseProduct(u);
  const Vector u5 = u2.cwiseProduct(u2).cwiseProduct(u);
  const double energy = kappa_.dot(int_power(s, params_.p_nl)) +
                        (params_.sigma / 5.0) * u5.sum() - source_.dot(u);
  return weight_ * energy;
}

Vector PlaplaceProblem::gradient(const Eigen::Ref<const Vector>& a) const {
  if (a.size() != n_) throw Error("plaplace: state dimension mismatch");
  if (!all_finite(a)) throw Error("plaplace: non-finite state");

  const Vector u = f_ * a;
  const Vector ux = gx_ * a;
  const Vector uy = gy_ * a;
  const Vector s = ux.cwiseProduct(ux) + uy.cwiseProduct(uy);

  const double p = static_cast<double>(params_.p_nl);
  const Vector cgrad = (2.0 * p) * kappa_.cwiseProduct(int_power(s, params_.p_nl - 1));
  const Vector u2 = u.cwiseProduct(u);
  const Vector u4 = u2.cwiseProduct(u2);

  Vector g = f_.transpose() * (params_.sigma * u4 - source_);
  g.noalias() += gx_.transpose() * cgrad.cwiseProduct(ux);
  g.noalias() += gy_.transpose() * cgrad.cwiseProduct(uy);
  return weight_ * g;
}

Matrix PlaplaceProblem::hessian(const Eigen::Ref<const Vector>& a) const {
  if (a.size() != n_) throw Error("plaplace: state dimension mismatch");
  if (!all_finite(a)) throw Error("plaplace: non-finite state");

  const Vector u = f_ * a;
  const Vector ux = gx_ * a;
  const Vector uy = gy_ * a;
  const Vector s = ux.cwiseProduct(ux) + uy.cwiseProduct(uy);
  const int p = params_.p_nl;

  Matrix h = Matrix::Zero(n_, n_);

  // 4 kappa P (P-1) s^{P-2} (grad u . grad f_k)(grad u . grad f_l)
  if (p >= 2) {
    Vector c1 = (4.0 * p * (p - 1)) * kappa_.cwiseProduct(int_power(s, p - 2));
    c1 = c1.cwiseSqrt();  // c1 >= 0, so fold into a rank-k update
    const Matrix d = c1.asDiagonal() * (ux.asDiagonal() * gx_ + uy.asDiagonal() * gy_);
    h.selfadjointView<Eigen::Lower>().rankUpdate(d.transpose());
    h.triangularView<Eigen::StrictlyUpper>() = h.transpose();
  }

  // 2 kappa P s^{P-1} (grad f_k . grad f_l)
  const Vector c2 = (2.0 * p) * kappa_.cwiseProduct(int_power(s, p - 1));
  h.noalias() += gx_.transpose() * c2.asDiagonal() * gx_;
  h.noalias() += gy_.transpose() * c2.asDiagonal() * gy_;

  // 4 sigma u^3 f_k f_l (sign varies; plain weighted product)
  const Vector c3 = (4.0 * params_.sigma) * u.cwiseProduct(u).cwiseProduct(u);
  h.noalias() += f_.transpose() * c3.asDiagonal() * f_;

  return weight_ * h;
}

Vector PlaplaceProblem::hessian_solve(const Eigen::Ref<const Vector>& a,
                                      const Eigen::Ref<const Vector>& rhs) const {
  const Matrix h = hessian(a);
  Eigen::ColPivHouseholderQR<Matrix> qr(h);
  if (qr.rank() < n_) throw SingularHessianError("plaplace: singular Hessian");
  Vector x = qr.solve(rhs);
  if (!all_finite(x)) throw SingularHessianError("plaplace: Hessian solve produced non-finite result");
  return x;
}

double PlaplaceProblem::field_norm_squared(const Eigen::Ref<const Vector>& a) const {
  // Orthogonality of the tensor sine basis: integral of u^2 is ||a||^2 / 4.
  return 0.25 * a.squaredNorm();
}

// ---------------------------------------------------------------------------
// SyntheticLowRankProblem

SyntheticLowRankProblem::SyntheticLowRankProblem(Index n, std::uint64_t seed) {
  if (n < 2) throw Error("synthetic_lowrank: n must be >= 2");
  RandomStream stream(splitmix64(seed ^ 0x5e11aULL));
  Matrix raw(n, 2);
  for (Index j = 0; j < 2; ++j) raw.col(j) = stream.normal_vector(n);
  Eigen::HouseholderQR<Matrix> qr(raw);
  w_ = qr.householderQ() * Matrix::Identity(n, 2);
  c_ = 3.0 * stream.normal_vector(2);
}

double SyntheticLowRankProblem::value(const Eigen::Ref<const Vector>& a) const {
  return 0.5 * (w_.transpose() * a - c_).squaredNorm();
}

Vector SyntheticLowRankProblem::gradient(const Eigen::Ref<const Vector>& a) const {
  return w_ * (w_.transpose() * a - c_);
}

// ---------------------------------------------------------------------------
// NoisyValleyProblem

NoisyValleyProblem::NoisyValleyProblem(Index n, double noise_sigma, std::uint64_t seed)
    : n_(n), noise_sigma_(noise_sigma), seed_(seed) {
  if (n < 2) throw Error("noisy_valley: n must be >= 2");
  if (noise_sigma < 0.0) throw Error("noisy_valley: noise_sigma must be >= 0");
}

double NoisyValleyProblem::value(const Eigen::Ref<const Vector>& a) const {
  double z = 0.0;
  for (Index i = 0; i + 1 < n_; ++i) {
    const double gap = a[i + 1] - a[i] * a[i];
    z += 100.0 * gap * gap + (1.0 - a[i]) * (1.0 - a[i]);
  }
  return z;
}

Vector NoisyValleyProblem::exact_gradient(const Eigen::Ref<const Vector>& a) const {
  Vector g = Vector::Zero(n_);
  for (Index i = 0; i + 1 < n_; ++i) {
    const double gap = a[i + 1] - a[i] * a[i];
    g[i] += -400.0 * a[i] * gap - 2.0 * (1.0 - a[i]);
    g[i + 1] += 200.0 * gap;
  }
  return g;
}

Vector NoisyValleyProblem::gradient(const Eigen::Ref<const Vector>& a) const {
  Vector g = exact_gradient(a);
  if (noise_sigma_ > 0.0) {
    RandomStream stream(splitmix64(seed_) ^ splitmix64(++call_counter_));
    for (Index i = 0; i < n_; ++i) g[i] += noise_sigma_ * stream.normal();
  }
  return g;
}

// ---------------------------------------------------------------------------
// Factory

namespace {

double parse_double_param(const std::string& key, const std::string& text) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(text, &pos);
    if (pos != text.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw Error("problem." + key + ": cannot parse '" + text + "' as a number");
  }
}

long parse_int_param(const std::string& key, const std::string& text) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(text, &pos);
    if (pos != text.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw Error("problem." + key + ": cannot parse '" + text + "' as an integer");
  }
}

Vector parse_vector_param(const std::string& key, const std::string& text) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) vals.push_back(parse_double_param(key, tok));
  Vector v(static_cast<Index>(vals.size()));
  for (std::size_t i = 0; i < vals.size(); ++i) v[static_cast<Index>(i)] = vals[i];
  return v;
}

class ParamReader {
public:
  ParamReader(const ProblemSpec& spec, const std::map<std::string, std::string>& schema)
      : schema_(schema) {
    for (const auto& [key, value] : spec.params) {
      if (key == "kind") continue;
      if (!schema.count(key)) throw Error("unknown problem parameter 'problem." + key + "'");
      values_[key] = value;
    }
    for (const auto& [key, def] : schema) {
      if (!values_.count(key)) values_[key] = def;
    }
  }

  double number(const std::string& key) const { return parse_double_param(key, values_.at(key)); }
  long integer(const std::string& key) const { return parse_int_param(key, values_.at(key)); }
  std::string raw(const std::string& key) const { return values_.at(key); }
  bool empty(const std::string& key) const { return values_.at(key).empty(); }
  Vector vector(const std::string& key) const { return parse_vector_param(key, values_.at(key)); }

private:
  const std::map<std::string, std::string>& schema_;
  std::map<std::string, std::string> values_;
};

Vector sized_or(const ParamReader& reader, const std::string& key, Index n, const Vector& fallback) {
  if (reader.empty(key)) return fallback;
  Vector v = reader.vector(key);
  if (v.size() != n) {
    throw Error("problem." + key + ": expected " + std::to_string(n) + " entries, got " +
                std::to_string(v.size()));
  }
  return v;
}

}  // namespace

std::map<std::string, std::string> problem_param_defaults(const std::string& kind) {
  if (kind == "quadratic") {
    return {{"n", "2"},       {"diag", ""},      {"b", ""},
            {"a0", ""},       {"eig_min", "0.5"}, {"eig_max", "2.5"}};
  }
  if (kind == "heat_inverse") {
    return {{"n_modes", "30"}, {"dt", "0.005"}, {"horizon", "0.25"},
            {"a_true", "2,1"}, {"a0", "3.5,1"}};
  }
  if (kind == "plaplace") {
    return {{"modes_per_dim", "15"}, {"p_nl", "2"},          {"sigma", "4"},
            {"quad_per_dim", "75"},  {"init_scale", "3"},    {"a0", ""}};
  }
  if (kind == "synthetic_lowrank") {
    return {{"n", "2000"}, {"a0", ""}};
  }
  if (kind == "noisy_valley") {
    return {{"n", "4"}, {"noise_sigma", "0"}, {"a0", ""}};
  }
  throw Error("unknown problem kind '" + kind + "'");
}

ProblemSetup make_problem(const ProblemSpec& spec, std::uint64_t seed) {
  const auto schema = problem_param_defaults(spec.kind);
  ParamReader reader(spec, schema);
  ProblemSetup setup;

  if (spec.kind == "quadratic") {
    const Index n = reader.integer("n");
    if (n < 1) throw Error("problem.n: must be >= 1");
    Matrix q;
    if (!reader.empty("diag")) {
      Vector d = sized_or(reader, "diag", n, Vector());
      q = d.asDiagonal();
    } else {
      // Random SPD with a controlled spectrum: Q = V diag(eigs) V^T.
      RandomStream stream(splitmix64(seed ^ 0x9aadULL));
      Matrix raw(n, n);
      for (Index j = 0; j < n; ++j) raw.col(j) = stream.normal_vector(n);
      Eigen::HouseholderQR<Matrix> qr(raw);
      const Matrix v = qr.householderQ() * Matrix::Identity(n, n);
      const double lo = reader.number("eig_min");
      const double hi = reader.number("eig_max");
      if (lo <= 0.0 || hi < lo) throw Error("problem.eig_min/eig_max: need 0 < eig_min <= eig_max");
      Vector eigs(n);
      for (Index i = 0; i < n; ++i) eigs[i] = (n == 1) ? lo : lo + (hi - lo) * i / double(n - 1);
      q = v * eigs.asDiagonal() * v.transpose();
      q = 0.5 * (q + q.transpose()).eval();
    }
    const Vector b = sized_or(reader, "b", n, Vector::Zero(n));
    RandomStream init(splitmix64(seed ^ 0x1717ULL));
    setup.initial_state = sized_or(reader, "a0", n, init.normal_vector(n));
    setup.objective = std::make_shared<QuadraticProblem>(std::move(q), b);
    return setup;
  }

  if (spec.kind == "heat_inverse") {
    HeatInverseProblem::Params p;
    p.n_modes = static_cast<int>(reader.integer("n_modes"));
    p.dt = reader.number("dt");
    p.horizon = reader.number("horizon");
    const Vector at = sized_or(reader, "a_true", 2, Vector());
    p.a_true << at[0], at[1];
    setup.initial_state = sized_or(reader, "a0", 2, Vector());
    setup.objective = std::make_shared<HeatInverseProblem>(p);
    return setup;
  }

  if (spec.kind == "plaplace") {
    PlaplaceProblem::Params p;
    p.modes_per_dim = static_cast<int>(reader.integer("modes_per_dim"));
    p.p_nl = static_cast<int>(reader.integer("p_nl"));
    p.sigma = reader.number("sigma");
    p.quad_per_dim = static_cast<int>(reader.integer("quad_per_dim"));
    auto obj = std::make_shared<PlaplaceProblem>(p);
    const Index n = obj->dim();
    if (reader.empty("a0")) {
      const double scale = reader.number("init_scale");
      RandomStream stream(splitmix64(seed ^ 0xb1a2ULL));
      Vector a0(n);
      for (Index i = 0; i < n; ++i) a0[i] = stream.uniform(-scale, scale);
      setup.initial_state = a0;
    } else {
      setup.initial_state = sized_or(reader, "a0", n, Vector());
    }
    setup.objective = std::move(obj);
    return setup;
  }

  if (spec.kind == "synthetic_lowrank") {
    const Index n = reader.integer("n");
    auto obj = std::make_shared<SyntheticLowRankProblem>(n, seed);
    RandomStream init(splitmix64(seed ^ 0x10aaULL));
    setup.initial_state = sized_or(reader, "a0", n, init.normal_vector(n));
    setup.objective = std::move(obj);
    return setup;
  }

  if (spec.kind == "noisy_valley") {
    const Index n = reader.integer("n");
    const double sigma = reader.number("noise_sigma");
    Vector start(n);
    for (Index i = 0; i < n; ++i) start[i] = (i % 2 == 0) ? -1.2 : 1.0;
    setup.initial_state = sized_or(reader, "a0", n, start);
    setup.objective = std::make_shared<NoisyValleyProblem>(n, sigma, splitmix64(seed ^ 0x7a11eULL));
    return setup;
  }

  throw Error("unknown problem kind '" + spec.kind + "'");
}

}  // namespace lgf
