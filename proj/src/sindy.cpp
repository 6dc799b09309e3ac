#include "lgf/sindy.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <limits>
#include <map>
#include <string>
#include <vector>

namespace lgf {

int min_history_for(FdScheme scheme) {
  switch (scheme) {
    case FdScheme::Forward: return 2;
    case FdScheme::Centered2: return 3;
    case FdScheme::Centered4: return 5;
  }
  throw Error("unknown finite-difference scheme");
}

TrajectoryHistory TrajectoryHistory::uniform(Matrix states, double eta, double t0,
                                             std::optional<Matrix> gradients) {
  TrajectoryHistory h;
  h.eta = eta;
  h.times.resize(states.rows());
  for (Index k = 0; k < states.rows(); ++k) h.times[k] = t0 + eta * static_cast<double>(k);
  h.states = std::move(states);
  h.gradients = std::move(gradients);
  h.validate();
  return h;
}

void TrajectoryHistory::validate() const {
  if (eta <= 0.0) throw Error("history: eta must be positive");
  if (states.rows() < 2) throw Error("history: need at least two samples");
  if (times.size() != states.rows()) throw Error("history: times/states size mismatch");
  const double tol = 1e-12 * eta;
  for (Index k = 0; k + 1 < times.size(); ++k) {
    const double dt = times[k + 1] - times[k];
    if (dt <= 0.0) throw Error("history: times must be strictly increasing");
    if (std::abs(dt - eta) > tol) throw Error("history: non-uniform time spacing");
  }
  if (gradients && (gradients->rows() != states.rows() || gradients->cols() != states.cols())) {
    throw Error("history: gradient matrix shape must match states");
  }
  if (!all_finite(states) || (gradients && !all_finite(*gradients))) {
    throw Error("history: non-finite sample");
  }
}

void StlsqConfig::validate() const {
  if (alpha < 0.0) throw Error("stlsq: alpha must be >= 0");
  if (threshold < 0.0) throw Error("stlsq: threshold must be >= 0");
  if (max_iter < 1) throw Error("stlsq: max_iter must be >= 1");
}

Matrix estimate_derivatives(const TrajectoryHistory& history, FdScheme scheme) {
  history.validate();
  const Index k = history.samples();
  const int kmin = min_history_for(scheme);
  if (k < kmin) {
    throw Error("estimate_derivatives: scheme needs at least " + std::to_string(kmin) +
                " samples, history has " + std::to_string(k));
  }

  const Matrix& a = history.states;
  const double h = history.eta;
  Matrix d(k, history.dim());

  switch (scheme) {
    case FdScheme::Forward:
      for (Index i = 0; i + 1 < k; ++i) d.row(i) = (a.row(i + 1) - a.row(i)) / h;
      d.row(k - 1) = (a.row(k - 1) - a.row(k - 2)) / h;  // backward at the end
      break;

    case FdScheme::Centered2:
      d.row(0) = (-3.0 * a.row(0) + 4.0 * a.row(1) - a.row(2)) / (2.0 * h);
      for (Index i = 1; i + 1 < k; ++i) d.row(i) = (a.row(i + 1) - a.row(i - 1)) / (2.0 * h);
      d.row(k - 1) = (3.0 * a.row(k - 1) - 4.0 * a.row(k - 2) + a.row(k - 3)) / (2.0 * h);
      break;

    case FdScheme::Centered4:
      d.row(0) = (-25.0 * a.row(0) + 48.0 * a.row(1) - 36.0 * a.row(2) + 16.0 * a.row(3) -
                  3.0 * a.row(4)) /
                 (12.0 * h);
      d.row(1) = (-3.0 * a.row(0) - 10.0 * a.row(1) + 18.0 * a.row(2) - 6.0 * a.row(3) +
                  a.row(4)) /
                 (12.0 * h);
      for (Index i = 2; i + 2 < k; ++i) {
        d.row(i) =
            (a.row(i - 2) - 8.0 * a.row(i - 1) + 8.0 * a.row(i + 1) - a.row(i + 2)) / (12.0 * h);
      }
      d.row(k - 2) = (3.0 * a.row(k - 1) + 10.0 * a.row(k - 2) - 18.0 * a.row(k - 3) +
                      6.0 * a.row(k - 4) - a.row(k - 5)) /
                     (12.0 * h);
      d.row(k - 1) = (25.0 * a.row(k - 1) - 48.0 * a.row(k - 2) + 36.0 * a.row(k - 3) -
                      16.0 * a.row(k - 4) + 3.0 * a.row(k - 5)) /
                     (12.0 * h);
      break;
  }
  return d;
}

namespace {

using Support = std::vector<Index>;

Matrix gather_columns(const Eigen::Ref<const Matrix>& m, const Support& cols) {
  Matrix out(m.rows(), static_cast<Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) out.col(static_cast<Index>(j)) = m.col(cols[j]);
  return out;
}

// Minimum-norm least-squares solve of [phi; sqrt(alpha) I] w = [target; 0]
// restricted to the given support, batched over target columns.
Matrix ridge_solve(const Eigen::Ref<const Matrix>& phi, const Eigen::Ref<const Matrix>& target,
                   const Support& support, const std::vector<Index>& target_cols, double alpha) {
  const Index rows = phi.rows();
  const Index na = static_cast<Index>(support.size());
  const Index nt = static_cast<Index>(target_cols.size());

  Matrix lhs;
  Matrix rhs;
  if (alpha > 0.0) {
    lhs.setZero(rows + na, na);
    lhs.topRows(rows) = gather_columns(phi, support);
    lhs.bottomRows(na).diagonal().setConstant(std::sqrt(alpha));
    rhs.setZero(rows + na, nt);
    for (Index j = 0; j < nt; ++j) rhs.col(j).head(rows) = target.col(target_cols[static_cast<std::size_t>(j)]);
  } else {
    lhs = gather_columns(phi, support);
    rhs.resize(rows, nt);
    for (Index j = 0; j < nt; ++j) rhs.col(j) = target.col(target_cols[static_cast<std::size_t>(j)]);
  }

  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(lhs);
  Matrix w = cod.solve(rhs);
  if (!all_finite(w)) throw Error("stlsq: non-finite solve result");
  return w;
}

}  // namespace

StlsqResult stlsq_fit(const Eigen::Ref<const Matrix>& phi, const Eigen::Ref<const Matrix>& target,
                      const StlsqConfig& cfg) {
  cfg.validate();
  if (phi.rows() != target.rows()) throw Error("stlsq: phi and target row counts differ");
  if (phi.rows() < 1) throw Error("stlsq: need at least one sample row");
  if (!all_finite(phi)) throw Error("stlsq: non-finite library entry");
  if (!all_finite(target)) throw Error("stlsq: non-finite target entry");

  const Index p = phi.cols();
  const Index m = target.cols();

  // Column scaling. Columns that are zero up to round-off (a variable frozen
  // across the window leaves ~1e-16 dust) never enter any support; scaling
  // such a column to unit norm would amplify pure noise.
  Vector col_norm = Vector::Ones(p);
  Matrix phi_n = phi;
  Support usable;
  usable.reserve(static_cast<std::size_t>(p));
  double max_norm = 0.0;
  for (Index j = 0; j < p; ++j) max_norm = std::max(max_norm, phi.col(j).norm());
  const double dead_column = 1e-12 * max_norm;
  for (Index j = 0; j < p; ++j) {
    const double norm = phi.col(j).norm();
    if (norm <= dead_column) continue;
    usable.push_back(j);
    if (cfg.normalize_columns) {
      col_norm[j] = norm;
      phi_n.col(j) /= norm;
    }
  }

  StlsqResult result;
  result.coefficients = Matrix::Zero(p, m);
  if (usable.empty()) {
    result.empty_active_set = m > 0;
    return result;
  }

  // Per-output-column supports; columns sharing a support are solved in one
  // batch. Iterate solve/prune rounds until every column is stable.
  std::map<Support, std::vector<Index>> groups;
  std::vector<Index> all_targets(static_cast<std::size_t>(m));
  for (Index c = 0; c < m; ++c) all_targets[static_cast<std::size_t>(c)] = c;
  groups.emplace(usable, std::move(all_targets));

  std::vector<Matrix> stable_w;  // per finished column, aligned below
  std::vector<Support> stable_supports;
  std::vector<std::vector<Index>> stable_targets;

  for (int iter = 0; iter < cfg.max_iter && !groups.empty(); ++iter) {
    std::map<Support, std::vector<Index>> next;
    const bool last_round = (iter + 1 == cfg.max_iter);
    for (auto& [support, targets] : groups) {
      Matrix w = ridge_solve(phi_n, target, support, targets, cfg.alpha);
      for (Index j = 0; j < static_cast<Index>(targets.size()); ++j) {
        Support pruned;
        pruned.reserve(support.size());
        Vector kept(w.rows());
        Index nk = 0;
        for (std::size_t i = 0; i < support.size(); ++i) {
          const double c = w(static_cast<Index>(i), j);
          if (std::abs(c) >= cfg.threshold) {
            pruned.push_back(support[i]);
            kept[nk++] = c;
          }
        }
        const Index col = targets[static_cast<std::size_t>(j)];
        if (pruned.empty()) {
          result.empty_active_set = true;  // f-hat is identically zero here
        } else if (pruned.size() == support.size() || last_round) {
          stable_supports.push_back(pruned);
          stable_targets.push_back({col});
          Matrix wcol(static_cast<Index>(pruned.size()), 1);
          wcol.col(0) = kept.head(nk);
          stable_w.push_back(std::move(wcol));
        } else {
          next[pruned].push_back(col);
        }
      }
    }
    groups = std::move(next);
  }

  // Final unregularized solve on each surviving support.
  if (cfg.unbias && cfg.alpha > 0.0) {
    std::map<Support, std::vector<Index>> regroup;
    for (std::size_t g = 0; g < stable_supports.size(); ++g) {
      for (Index col : stable_targets[g]) regroup[stable_supports[g]].push_back(col);
    }
    for (const auto& [support, targets] : regroup) {
      Matrix w = ridge_solve(phi_n, target, support, targets, 0.0);
      for (std::size_t j = 0; j < targets.size(); ++j) {
        for (std::size_t i = 0; i < support.size(); ++i) {
          result.coefficients(support[i], targets[j]) =
              w(static_cast<Index>(i), static_cast<Index>(j)) / col_norm[support[i]];
        }
      }
    }
  } else {
    for (std::size_t g = 0; g < stable_supports.size(); ++g) {
      const auto& support = stable_supports[g];
      for (std::size_t j = 0; j < stable_targets[g].size(); ++j) {
        for (std::size_t i = 0; i < support.size(); ++i) {
          result.coefficients(support[i], stable_targets[g][j]) =
              stable_w[g](static_cast<Index>(i), static_cast<Index>(j)) / col_norm[support[i]];
        }
      }
    }
  }

  return result;
}

namespace {

// Rows whose stencil matches the interior one. The one-sided boundary rows
// approximate a slightly different discrete map; on the near-singular design
// of a short window that inconsistency blows up the fitted coefficients, so
// the regression sticks to the self-consistent interior block.
struct RowRange {
  Index lo, len;
};

RowRange interior_rows(FdScheme scheme, Index k) {
  switch (scheme) {
    case FdScheme::Forward: return {0, k - 1};
    case FdScheme::Centered2: return {1, k - 2};
    case FdScheme::Centered4: return {2, k - 4};
  }
  throw Error("unknown finite-difference scheme");
}

}  // namespace

SurrogateModel fit_state_dynamics(const TrajectoryHistory& history, const CandidateLibrary& lib,
                                  FdScheme scheme, const StlsqConfig& cfg) {
  if (history.dim() != lib.n) throw Error("fit_state_dynamics: history/library dimension mismatch");
  const Matrix phi = build_library_matrix(lib, history.states);
  const Matrix dstates = estimate_derivatives(history, scheme);
  const RowRange rows = interior_rows(scheme, history.samples());
  StlsqResult fit =
      stlsq_fit(phi.middleRows(rows.lo, rows.len), dstates.middleRows(rows.lo, rows.len), cfg);

  SurrogateModel model;
  model.library = lib;
  model.xi = std::move(fit.coefficients);
  model.target_kind = TargetKind::StateDerivative;
  model.empty_active_set = fit.empty_active_set;
  return model;
}

SurrogateModel fit_gradient_model(const TrajectoryHistory& history, const CandidateLibrary& lib,
                                  const StlsqConfig& cfg) {
  if (!history.gradients) throw Error("fit_gradient_model: history has no gradient samples");
  if (history.dim() != lib.n) throw Error("fit_gradient_model: history/library dimension mismatch");
  const Matrix phi = build_library_matrix(lib, history.states);
  StlsqResult fit = stlsq_fit(phi, *history.gradients, cfg);

  SurrogateModel model;
  model.library = lib;
  model.xi = std::move(fit.coefficients);
  model.target_kind = TargetKind::Gradient;
  model.empty_active_set = fit.empty_active_set;
  return model;
}

SurrogateModel fit_latent_dynamics(const TrajectoryHistory& history, int r, int degree,
                                   FdScheme scheme, const StlsqConfig& cfg) {
  history.validate();
  const Index n = history.dim();
  const Index k = history.samples();
  if (r < 1 || r > std::min(n, k)) {
    throw Error("fit_latent_dynamics: rank " + std::to_string(r) + " out of range [1, " +
                std::to_string(std::min(n, k)) + "]");
  }

  TruncatedSvd svd = truncated_svd(history.states.transpose(), r);
  const Matrix& u = svd.basis.u;

  TrajectoryHistory latent;
  latent.eta = history.eta;
  latent.times = history.times;
  latent.states = history.states * u;  // rows are U^T a_k
  if (history.gradients) latent.gradients = (*history.gradients) * u;

  const CandidateLibrary lib = build_library(r, degree);
  SurrogateModel model = history.gradients
                             ? fit_gradient_model(latent, lib, cfg)
                             : fit_state_dynamics(latent, lib, scheme, cfg);
  model.basis = std::move(svd.basis);
  return model;
}

Vector predict_rhs(const SurrogateModel& model, const Eigen::Ref<const Vector>& a) {
  Vector out;
  if (model.basis) {
    const ReducedBasis& basis = *model.basis;
    if (a.size() != basis.u.rows()) {
      throw Error("predict_rhs: state length " + std::to_string(a.size()) +
                  " != basis dimension " + std::to_string(basis.u.rows()));
    }
    const Vector latent = basis.u.transpose() * a;
    out = basis.u * (model.xi.transpose() * eval_library(model.library, latent));
  } else {
    out = model.xi.transpose() * eval_library(model.library, a);
  }
  if (!all_finite(out)) {
    throw NonFiniteError("predict_rhs: non-finite model output",
                         std::numeric_limits<double>::quiet_NaN(), Vector(a));
  }
  return out;
}

}  // namespace lgf
