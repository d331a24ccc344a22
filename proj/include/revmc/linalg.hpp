#pragma once

#include <span>

#include "revmc/matrix.hpp"

namespace revmc {

/// Eigenpairs of a real symmetric matrix, eigenvalues sorted descending.
/// Row i of `vectors` is the unit eigenvector for `values[i]`.
struct SymmetricEigen {
  Vector values;
  Matrix vectors;
};

/// Cyclic Jacobi eigensolver. Accurate to a few ulps of the matrix norm,
/// deterministic, and cheap enough for the few-hundred-state chains this
/// library targets. Only the upper triangle of `a` is read.
SymmetricEigen symmetric_eigen(Matrix a);

/// Solves a x = b by LU with partial pivoting. Throws SingularSystem when a
/// pivot falls below 1e-14 of the matrix scale.
Vector solve(Matrix a, Vector b);
Matrix inverse(Matrix a);

/// Largest |w_i a_ij - w_j a_ji|: zero exactly when `a` is self-adjoint in
/// the w-weighted inner product.
double self_adjoint_violation(const Matrix& a, std::span<const double> w);

/// W^{1/2} a W^{-1/2}, averaged with its transpose so the result is exactly
/// symmetric.
Matrix symmetrize(const Matrix& a, std::span<const double> w);

/// Eigen-decomposition of an operator self-adjoint in <f,g> = sum f g w.
/// Rows of `vectors` are w-orthonormal eigenvectors, values descending.
/// Eigenvectors are sign-normalized so their first non-negligible
/// coordinate is positive.
SymmetricEigen self_adjoint_eigen(const Matrix& a, std::span<const double> w);

/// h(A) = sum_i h(lambda_i) v_i v_i^T W for a w-self-adjoint decomposition.
template <class F>
Matrix spectral_function(const SymmetricEigen& eig, std::span<const double> w, F&& h) {
  const std::size_t n = eig.values.size();
  Matrix out(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const double hk = h(eig.values[k]);
    auto v = eig.vectors.row(k);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) out(i, j) += hk * v[i] * v[j] * w[j];
  }
  return out;
}

}  // namespace revmc
