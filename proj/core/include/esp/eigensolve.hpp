#pragma once

#include <cstddef>
#include <vector>

namespace esp {

// Symmetric tridiagonal matrix: diag has n entries, offdiag n-1.
struct SymTridiagonal {
  std::vector<double> diag;
  std::vector<double> offdiag;
};

// Dense square matrix, row major.
struct Matrix {
  int n = 0;
  std::vector<double> a;

  Matrix() = default;
  explicit Matrix(int n_) : n(n_), a(static_cast<size_t>(n_) * n_, 0.0) {}

  double& operator()(int i, int j) { return a[static_cast<size_t>(i) * n + j]; }
  double operator()(int i, int j) const {
    return a[static_cast<size_t>(i) * n + j];
  }
};

// Eigen decomposition result.  values are ascending; vectors[k] is the
// eigenvector for values[k], normalized and sign-fixed so that the first
// component exceeding 1e-12 in magnitude is positive (deterministic output
// for reproducible downstream labeling).  residual_bound is the largest
// 2-norm of (A v - lambda v) over the returned pairs (generalized solves
// measure A v - lambda M v).
struct EigenPairs {
  std::vector<double> values;
  std::vector<std::vector<double>> vectors;
  double residual_bound = 0.0;
};

// Implicit-shift QL with eigenvector accumulation; at most 30 shift
// iterations per eigenvalue (throws esp::numerical_error beyond).
EigenPairs eig_tridiagonal(const SymTridiagonal& T);

// Same iteration without accumulating vectors (cheaper for sweeps).
std::vector<double> eig_tridiagonal_values(const SymTridiagonal& T);

// Cyclic Jacobi rotations.  Requires symmetry to 1e-12 relative; sweeps
// until the off-diagonal Frobenius norm drops below 1e-13 * ||A||_F.
EigenPairs eig_dense_symmetric(const Matrix& A);

// Generalized symmetric-definite problem A x = lambda M x via Cholesky
// M = L L^T and a dense solve on L^-1 A L^-T.  Returns the k smallest pairs;
// eigenvectors are M-orthonormal.  A Cholesky breakdown (mass matrix not
// positive definite, typically an under-resolved quadrature) throws
// esp::numerical_error.
EigenPairs eig_generalized(const Matrix& A, const Matrix& M, int k);

}  // namespace esp
