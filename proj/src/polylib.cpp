#include "lgf/polylib.hpp"

#include <string>
#include <vector>

namespace lgf {

namespace {

void check_args(int n, int degree) {
  if (n < 1) throw Error("library dimension must be >= 1, got " + std::to_string(n));
  if (degree < 0) throw Error("library degree must be >= 0, got " + std::to_string(degree));
}

}  // namespace

std::uint64_t library_size(int n, int degree, std::uint64_t cap) {
  check_args(n, degree);
  // C(n+degree, degree) built up one factor at a time; bail as soon as the
  // running count passes the cap so intermediates cannot overflow.
  std::uint64_t count = 1;
  for (int i = 1; i <= degree; ++i) {
    count = count * (static_cast<std::uint64_t>(n) + i) / i;
    if (count > cap) {
      throw Error("library too large: C(" + std::to_string(n + degree) + ", " +
                  std::to_string(degree) + ") > " + std::to_string(cap) +
                  " (exceeded at " + std::to_string(count) + " terms)");
    }
  }
  return count;
}

CandidateLibrary build_library(int n, int degree, std::uint64_t cap) {
  const auto p = library_size(n, degree, cap);

  CandidateLibrary lib;
  lib.n = n;
  lib.max_degree = degree;
  lib.exponents.resize(static_cast<Index>(p), n);

  std::vector<int> current(static_cast<std::size_t>(n), 0);
  Index row = 0;
  // Within each total degree d, assign the leftmost variable the largest
  // remaining exponent first; this reproduces 1, a1, a2, a1^2, a1 a2, a2^2.
  auto emit = [&](auto&& self, int var, int remaining) -> void {
    if (var == n - 1) {
      current[static_cast<std::size_t>(var)] = remaining;
      for (int i = 0; i < n; ++i) lib.exponents(row, i) = current[static_cast<std::size_t>(i)];
      ++row;
      return;
    }
    for (int e = remaining; e >= 0; --e) {
      current[static_cast<std::size_t>(var)] = e;
      self(self, var + 1, remaining - e);
    }
  };
  for (int d = 0; d <= degree; ++d) emit(emit, 0, d);

  return lib;
}

Vector eval_library(const CandidateLibrary& lib, const Eigen::Ref<const Vector>& a) {
  if (a.size() != lib.n) {
    throw Error("eval_library: state has length " + std::to_string(a.size()) +
                ", library expects " + std::to_string(lib.n));
  }
  if (!all_finite(a)) throw Error("eval_library: non-finite state entry");

  // Power table per variable, built by repeated multiplication so results
  // are bitwise reproducible across platforms.
  const int n = lib.n;
  const int pmax = lib.max_degree;
  Matrix powers(n, pmax + 1);
  for (int i = 0; i < n; ++i) {
    powers(i, 0) = 1.0;
    for (int e = 1; e <= pmax; ++e) powers(i, e) = powers(i, e - 1) * a[i];
  }

  Vector phi(lib.size());
  for (Index j = 0; j < lib.size(); ++j) {
    double term = 1.0;
    for (int i = 0; i < n; ++i) {
      const int e = lib.exponents(j, i);
      if (e != 0) term *= powers(i, e);
    }
    phi[j] = term;
  }
  return phi;
}

Matrix build_library_matrix(const CandidateLibrary& lib, const Eigen::Ref<const Matrix>& samples) {
  if (samples.cols() != lib.n) {
    throw Error("build_library_matrix: samples have " + std::to_string(samples.cols()) +
                " columns, library expects " + std::to_string(lib.n));
  }
  if (samples.rows() < 1) throw Error("build_library_matrix: need at least one sample row");

  Matrix phi(samples.rows(), lib.size());
  for (Index k = 0; k < samples.rows(); ++k) {
    phi.row(k) = eval_library(lib, samples.row(k).transpose()).transpose();
  }
  return phi;
}

}  // namespace lgf
