#pragma once

#include "lgf/types.hpp"

namespace lgf {

/// Rank-r orthonormal basis extracted from a trajectory by truncated SVD.
struct ReducedBasis {
  Matrix u;                ///< n x r, orthonormal columns
  Vector singular_values;  ///< length r, descending, >= 0

  int rank() const { return static_cast<int>(u.cols()); }
  Index full_dim() const { return u.rows(); }
};

struct TruncatedSvd {
  ReducedBasis basis;
  Matrix v;  ///< K x r mode coefficients
};

/// Best rank-r approximation of a_t (n x K) in Frobenius norm. The sign of
/// each left singular vector is fixed so its largest-magnitude entry is
/// positive. For short wide snapshots (K < 50, n large) the decomposition
/// goes through the K x K Gram matrix; directions with (numerically) zero
/// singular value are completed with orthonormal fill so UᵀU = I holds.
TruncatedSvd truncated_svd(const Eigen::Ref<const Matrix>& a_t, int r);

Vector project(const ReducedBasis& basis, const Eigen::Ref<const Vector>& a);
Vector lift(const ReducedBasis& basis, const Eigen::Ref<const Vector>& latent);

}  // namespace lgf
