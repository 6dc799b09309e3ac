#pragma once

#include <cstdint>

#include "lgf/types.hpp"

namespace lgf {

/// All monomials in n variables up to total degree P, ordered by ascending
/// total degree with ties broken so earlier variables carry the higher
/// exponent first. For n=2, P=2 the terms are 1, a1, a2, a1^2, a1*a2, a2^2.
struct CandidateLibrary {
  int n = 0;
  int max_degree = 0;
  /// p x n exponent rows; row 0 is the constant term.
  Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic> exponents;

  Index size() const { return exponents.rows(); }
};

/// Library sizes above this cap fail fast instead of exhausting memory.
inline constexpr std::uint64_t kDefaultLibraryCap = 2'000'000;

/// Number of monomials C(n+P, P). Throws Error ("library too large") when
/// the count exceeds `cap`.
std::uint64_t library_size(int n, int degree,
                           std::uint64_t cap = kDefaultLibraryCap);

CandidateLibrary build_library(int n, int degree,
                               std::uint64_t cap = kDefaultLibraryCap);

/// phi(a): one value per library term; entry 0 is always 1.
Vector eval_library(const CandidateLibrary& lib,
                    const Eigen::Ref<const Vector>& a);

/// Phi(A): row k is eval_library of sample row k.
Matrix build_library_matrix(const CandidateLibrary& lib,
                            const Eigen::Ref<const Matrix>& samples);

}  // namespace lgf
