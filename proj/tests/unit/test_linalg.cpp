#include <gtest/gtest.h>

#include <cmath>

#include "generators.hpp"
#include "oracle.hpp"
#include "revmc/error.hpp"
#include "revmc/linalg.hpp"

namespace revmc {
namespace {

using testing::Rng;

Matrix random_symmetric(Rng& rng, std::size_t n) {
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) a(i, j) = a(j, i) = testing::uniform(rng, -1.0, 1.0);
  return a;
}

TEST(Jacobi, MatchesEigenOracleOnRandomSymmetric) {
  Rng rng(1);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = testing::pick(rng, 1, 40);
    const Matrix a = random_symmetric(rng, n);
    const SymmetricEigen e = symmetric_eigen(a);
    const auto ref = oracle::symmetric_eigenvalues(a);
    ASSERT_EQ(e.values.size(), n);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(e.values[i], ref[i], 1e-12 * (1.0 + std::abs(ref[i])));
    for (std::size_t i = 1; i < n; ++i) EXPECT_GE(e.values[i - 1], e.values[i]);
  }
}

TEST(Jacobi, EigenvectorsAreOrthonormalAndSatisfyEquation) {
  Rng rng(2);
  const std::size_t n = 17;
  const Matrix a = random_symmetric(rng, n);
  const SymmetricEigen e = symmetric_eigen(a);
  for (std::size_t i = 0; i < n; ++i) {
    auto v = e.vectors.row(i);
    const Vector av = a * v;
    for (std::size_t k = 0; k < n; ++k) EXPECT_NEAR(av[k], e.values[i] * v[k], 1e-12);
    for (std::size_t j = 0; j < n; ++j) {
      double d = 0.0;
      for (std::size_t k = 0; k < n; ++k) d += v[k] * e.vectors(j, k);
      EXPECT_NEAR(d, i == j ? 1.0 : 0.0, 1e-12);
    }
  }
}

TEST(Jacobi, RepeatedEigenvaluesAndDiagonalInput) {
  const Vector diag{3.0, -1.0, 3.0, 0.5};
  const Matrix d = Matrix::diagonal(diag);
  const SymmetricEigen e = symmetric_eigen(d);
  EXPECT_EQ(e.values, (Vector{3.0, 3.0, 0.5, -1.0}));
  const Matrix ones(4, 4, 1.0);
  const SymmetricEigen f = symmetric_eigen(ones);
  EXPECT_NEAR(f.values[0], 4.0, 1e-14);
  for (std::size_t i = 1; i < 4; ++i) EXPECT_NEAR(f.values[i], 0.0, 1e-14);
}

TEST(SelfAdjoint, SignConvention) {
  Rng rng(3);
  const Vector w = testing::random_vector(rng, 6, 0.1, 1.0);
  const SymmetricEigen e = self_adjoint_eigen(testing::random_positive_operator(rng, w), w);
  for (std::size_t i = 0; i < 6; ++i) {
    auto v = e.vectors.row(i);
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    for (double x : v)
      if (std::abs(x) > 1e-10 * m) {
        EXPECT_GT(x, 0.0);
        break;
      }
  }
}

TEST(Solve, MatchesResidualAndInverse) {
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = testing::pick(rng, 1, 25);
    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) a(i, j) = testing::uniform(rng, -1.0, 1.0) + (i == j ? 3.0 : 0.0);
    const Vector b = testing::random_vector(rng, n);
    const Vector x = solve(a, b);
    const Vector r = a * std::span<const double>(x);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(r[i], b[i], 1e-12);
    const Matrix prod = a * inverse(a);
    EXPECT_LE(max_abs_diff(prod, Matrix::identity(n)), 1e-12);
  }
}

TEST(Solve, SingularThrows) {
  const Matrix a{{1.0, 2.0}, {2.0, 4.0}};
  try {
    solve(a, {1.0, 1.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingularSystem);
  }
}

TEST(SelfAdjoint, WeightedDecompositionMatchesOracle) {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = testing::pick(rng, 2, 12);
    const Vector w = testing::random_vector(rng, n, 0.1, 2.0);
    const Matrix a = testing::random_positive_operator(rng, w);
    EXPECT_LE(self_adjoint_violation(a, w), 1e-12);
    const SymmetricEigen e = self_adjoint_eigen(a, w);
    const auto ref = oracle::eigenvalues(a, w);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(e.values[i], ref[i], 1e-11 * (1.0 + std::abs(ref[i])));
    // w-orthonormal rows
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double d = 0.0;
        for (std::size_t k = 0; k < n; ++k) d += e.vectors(i, k) * e.vectors(j, k) * w[k];
        EXPECT_NEAR(d, i == j ? 1.0 : 0.0, 1e-11);
      }
    // spectral_function with the identity reconstructs a
    const Matrix back = spectral_function(e, w, [](double x) { return x; });
    EXPECT_LE(max_abs_diff(back, a), 1e-10);
  }
}

TEST(MatrixOps, Basics) {
  const Matrix a{{1.0, 2.0}, {3.0, 4.0}};
  EXPECT_EQ(a.trace(), 5.0);
  EXPECT_EQ(a.transposed()(0, 1), 3.0);
  EXPECT_EQ((a + a)(1, 1), 8.0);
  EXPECT_EQ((a - a), Matrix(2, 2));
  EXPECT_EQ((a * a)(0, 0), 7.0);
  EXPECT_EQ(max_abs(a), 4.0);
  EXPECT_EQ(Matrix::identity(2) * a, a);
}

}  // namespace
}  // namespace revmc
