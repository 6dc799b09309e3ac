#include "lgf/reduction.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <string>

namespace lgf {

namespace {

// Flip signs so the largest-magnitude entry of each column of U is positive;
// V follows so the product is unchanged.
void fix_signs(Matrix& u, Matrix& v) {
  for (Index j = 0; j < u.cols(); ++j) {
    Index imax = 0;
    u.col(j).cwiseAbs().maxCoeff(&imax);
    if (u(imax, j) < 0.0) {
      u.col(j) = -u.col(j);
      v.col(j) = -v.col(j);
    }
  }
}

// Deterministic orthonormal fill for directions whose singular value is
// numerically zero: orthogonalize unit vectors against the columns built so
// far and keep the first with a healthy residual.
Vector orthonormal_fill(const Matrix& u, Index upto) {
  const Index n = u.rows();
  for (Index cand = 0; cand < n; ++cand) {
    Vector w = Vector::Zero(n);
    w[cand] = 1.0;
    for (Index j = 0; j < upto; ++j) w -= u.col(j).dot(w) * u.col(j);
    const double norm = w.norm();
    if (norm > 0.5) return w / norm;
  }
  throw Error("truncated_svd: could not complete an orthonormal basis");
}

}  // namespace

TruncatedSvd truncated_svd(const Eigen::Ref<const Matrix>& a_t, int r) {
  const Index n = a_t.rows();
  const Index k = a_t.cols();
  if (r < 1 || r > std::min(n, k)) {
    throw Error("truncated_svd: rank " + std::to_string(r) + " out of range [1, " +
                std::to_string(std::min(n, k)) + "]");
  }

  Matrix u, v;
  Vector sigma;

  if (k < 50 && n > k) {
    // Method of snapshots: the K x K Gram matrix costs O(n K^2) and never
    // materializes an n x n factor.
    const Matrix gram = a_t.transpose() * a_t;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
    if (eig.info() != Eigen::Success) throw Error("truncated_svd: eigensolver failed");

    u.resize(n, r);
    v.resize(k, r);
    sigma.resize(r);
    const double lambda_max = std::max(eig.eigenvalues().maxCoeff(), 0.0);
    // Eigenvalues below the solver's noise floor (~eps * lambda_max) carry
    // no usable direction; treat them as exact zeros.
    const double tol = lambda_max * 1e-13;
    for (int j = 0; j < r; ++j) {
      const Index src = k - 1 - j;  // eigenvalues come back ascending
      const double lambda = eig.eigenvalues()[src];
      if (lambda > tol && lambda > 0.0) {
        sigma[j] = std::sqrt(lambda);
        v.col(j) = eig.eigenvectors().col(src);
        u.col(j) = a_t * v.col(j) / sigma[j];
        u.col(j).normalize();
      } else {
        sigma[j] = 0.0;
        u.col(j) = orthonormal_fill(u, j);
        v.col(j) = eig.eigenvectors().col(src);
      }
    }
  } else {
    Eigen::BDCSVD<Matrix> svd(a_t, Eigen::ComputeThinU | Eigen::ComputeThinV);
    u = svd.matrixU().leftCols(r);
    v = svd.matrixV().leftCols(r);
    sigma = svd.singularValues().head(r);
  }

  fix_signs(u, v);

  TruncatedSvd out;
  out.basis.u = std::move(u);
  out.basis.singular_values = std::move(sigma);
  out.v = std::move(v);
  return out;
}

Vector project(const ReducedBasis& basis, const Eigen::Ref<const Vector>& a) {
  if (a.size() != basis.u.rows()) {
    throw Error("project: state length " + std::to_string(a.size()) + " != basis dimension " +
                std::to_string(basis.u.rows()));
  }
  return basis.u.transpose() * a;
}

Vector lift(const ReducedBasis& basis, const Eigen::Ref<const Vector>& latent) {
  if (latent.size() != basis.u.cols()) {
    throw Error("lift: latent length " + std::to_string(latent.size()) + " != basis rank " +
                std::to_string(basis.u.cols()));
  }
  return basis.u * latent;
}

}  // namespace lgf
