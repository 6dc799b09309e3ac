#include <doctest.h>

#include <random>

#include "lgf/polylib.hpp"

using namespace lgf;

TEST_SUITE("polylib") {

TEST_CASE("library_size matches binomial identities") {
  CHECK(library_size(2, 2) == 6);
  CHECK(library_size(5, 0) == 1);
  CHECK(library_size(3, 1) == 4);
  CHECK(library_size(1, 3) == 4);
  CHECK(library_size(10, 3) == 286);
}

TEST_CASE("library_size rejects bad arguments and oversized libraries") {
  CHECK_THROWS_AS(library_size(0, 2), Error);
  CHECK_THROWS_AS(library_size(2, -1), Error);
  CHECK_THROWS_WITH_AS(library_size(1000, 10), doctest::Contains("library too large"), Error);
  CHECK_THROWS_AS(library_size(10, 4, 100), Error);  // explicit small cap
}

TEST_CASE("build_library produces the documented ordering") {
  const CandidateLibrary lib = build_library(2, 2);
  REQUIRE(lib.size() == 6);
  const int expected[6][2] = {{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}};
  for (int j = 0; j < 6; ++j) {
    CHECK(lib.exponents(j, 0) == expected[j][0]);
    CHECK(lib.exponents(j, 1) == expected[j][1]);
  }
}

TEST_CASE("build_library univariate and constant-only cases") {
  const CandidateLibrary cubic = build_library(1, 3);
  REQUIRE(cubic.size() == 4);
  for (int j = 0; j < 4; ++j) CHECK(cubic.exponents(j, 0) == j);

  const CandidateLibrary constant = build_library(2, 0);
  REQUIRE(constant.size() == 1);
  CHECK(constant.exponents(0, 0) == 0);
  CHECK(constant.exponents(0, 1) == 0);
}

TEST_CASE("library has no duplicates and sizes agree for a sweep of (n, P)") {
  for (int n = 1; n <= 4; ++n) {
    for (int degree = 0; degree <= 4; ++degree) {
      const CandidateLibrary lib = build_library(n, degree);
      CHECK(static_cast<std::uint64_t>(lib.size()) == library_size(n, degree));
      // first term constant
      CHECK(lib.exponents.row(0).sum() == 0);
      for (Index i = 0; i < lib.size(); ++i) {
        CHECK(lib.exponents.row(i).sum() <= degree);
        for (Index j = i + 1; j < lib.size(); ++j) {
          CHECK(lib.exponents.row(i) != lib.exponents.row(j));
        }
      }
      // graded: total degree never decreases
      for (Index i = 0; i + 1 < lib.size(); ++i) {
        CHECK(lib.exponents.row(i).sum() <= lib.exponents.row(i + 1).sum());
      }
    }
  }
}

TEST_CASE("eval_library on hand-computed points") {
  const CandidateLibrary lib = build_library(2, 2);
  Vector a(2);
  a << 2.0, 3.0;
  const Vector phi = eval_library(lib, a);
  const double expected[6] = {1, 2, 3, 4, 6, 9};
  for (int j = 0; j < 6; ++j) CHECK(phi[j] == expected[j]);

  a << 0.0, 0.0;
  const Vector zero = eval_library(lib, a);
  CHECK(zero[0] == 1.0);
  CHECK(zero.tail(5).cwiseAbs().maxCoeff() == 0.0);

  const CandidateLibrary uni = build_library(1, 3);
  Vector x(1);
  x << 2.0;
  const Vector powers = eval_library(uni, x);
  CHECK(powers[0] == 1.0);
  CHECK(powers[1] == 2.0);
  CHECK(powers[2] == 4.0);
  CHECK(powers[3] == 8.0);
}

TEST_CASE("eval_library rejects non-finite and misdimensioned input") {
  const CandidateLibrary lib = build_library(2, 2);
  Vector bad(2);
  bad << 1.0, std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(eval_library(lib, bad), Error);
  CHECK_THROWS_AS(eval_library(lib, Vector::Ones(3)), Error);
}

TEST_CASE("eval_library is multiplicative over monomials") {
  // phi_i(a) * phi_j(a) equals the evaluation of the summed multi-index.
  const CandidateLibrary lib = build_library(3, 2);
  const CandidateLibrary big = build_library(3, 4);
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> dist(-1.5, 1.5);
  for (int trial = 0; trial < 20; ++trial) {
    Vector a(3);
    for (int i = 0; i < 3; ++i) a[i] = dist(rng);
    const Vector phi = eval_library(lib, a);
    const Vector phi_big = eval_library(big, a);
    for (Index i = 0; i < lib.size(); ++i) {
      for (Index j = 0; j < lib.size(); ++j) {
        const Eigen::RowVectorXi sum = lib.exponents.row(i) + lib.exponents.row(j);
        // locate the summed multi-index in the degree-4 library
        Index found = -1;
        for (Index k = 0; k < big.size(); ++k) {
          if (big.exponents.row(k) == sum) {
            found = k;
            break;
          }
        }
        REQUIRE(found >= 0);
        CHECK(phi[i] * phi[j] == doctest::Approx(phi_big[found]).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("build_library_matrix rows equal eval_library rows") {
  const CandidateLibrary lib = build_library(2, 2);
  Matrix samples(3, 2);
  samples << 2, 3, 2, 3, 2, 3;
  const Matrix phi = build_library_matrix(lib, samples);
  REQUIRE(phi.rows() == 3);
  CHECK(phi.row(0) == phi.row(1));
  CHECK(phi.row(1) == phi.row(2));
  for (Index k = 0; k < samples.rows(); ++k) {
    const Vector row = eval_library(lib, samples.row(k).transpose());
    CHECK((phi.row(k).transpose() - row).cwiseAbs().maxCoeff() == 0.0);
  }

  const CandidateLibrary linear = build_library(2, 1);
  Matrix units(2, 2);
  units << 1, 0, 0, 1;
  const Matrix unit_phi = build_library_matrix(linear, units);
  Matrix expected(2, 3);
  expected << 1, 1, 0, 1, 0, 1;
  CHECK((unit_phi - expected).cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(build_library_matrix(lib, Matrix::Ones(2, 3)), Error);
}

}  // TEST_SUITE
