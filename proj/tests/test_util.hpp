#pragma once

#include <bit>
#include <cstdint>
#include <cstdlib>
#include <random>

#include "lgf/types.hpp"

namespace lgf::testutil {

// Distance in representable doubles between a and b (0 means bit-identical).
inline std::uint64_t ulp_distance(double a, double b) {
  if (a == b) return 0;
  if (std::isnan(a) || std::isnan(b)) return UINT64_MAX;
  auto ordered = [](double x) {
    const auto bits = std::bit_cast<std::uint64_t>(x);
    // map sign-magnitude onto a monotone integer line
    return (bits & 0x8000000000000000ULL) ? ~bits + 1 + 0x8000000000000000ULL
                                          : bits + 0x8000000000000000ULL;
  };
  const auto ua = ordered(a);
  const auto ub = ordered(b);
  return ua > ub ? ua - ub : ub - ua;
}

inline std::uint64_t max_ulp_distance(const Vector& a, const Vector& b) {
  std::uint64_t worst = 0;
  for (Index i = 0; i < a.size(); ++i) worst = std::max(worst, ulp_distance(a[i], b[i]));
  return worst;
}

inline Matrix random_normal(Index rows, Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist;
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = dist(rng);
  return m;
}

}  // namespace lgf::testutil
