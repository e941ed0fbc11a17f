#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ol2r {

/// Dense square matrix, row-major. Just enough machinery for the
/// covariance bookkeeping: Cholesky, rank-one inverse maintenance and
/// quadratic forms.
struct DenseMatrix {
  int n = 0;
  std::vector<double> a;

  DenseMatrix() = default;
  explicit DenseMatrix(int n_) : n(n_), a(static_cast<std::size_t>(n_) * n_, 0.0) {}

  double& at(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
  double at(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
  double* row(int i) { return a.data() + static_cast<std::size_t>(i) * n; }
  const double* row(int i) const { return a.data() + static_cast<std::size_t>(i) * n; }

  static DenseMatrix identity_scaled(int n, double s);
};

double dot(std::span<const double> x, std::span<const double> y);

/// out = A x
void matvec(const DenseMatrix& A, std::span<const double> x, std::span<double> out);

/// v^T A v
double quadform(const DenseMatrix& A, std::span<const double> v);

/// A += w * v v^T
void rank_one_update(DenseMatrix& A, std::span<const double> v, double w = 1.0);

/// In-place Sherman-Morrison: given Ainv = A^{-1}, rewrites it to
/// (A + v v^T)^{-1}. Returns the scalar 1 + v^T A^{-1} v.
double sherman_morrison_update(DenseMatrix& Ainv, std::span<const double> v);

/// Lower Cholesky factor of a symmetric positive definite matrix.
/// Throws CovarianceError when the matrix is not numerically PD.
DenseMatrix cholesky_factor(const DenseMatrix& A);

/// log det(A) through the Cholesky factor.
double cholesky_logdet(const DenseMatrix& A);

/// A^{-1} through the Cholesky factor.
DenseMatrix cholesky_inverse(const DenseMatrix& A);

/// max_ij |(A * Ainv - I)_ij|, the drift check for incremental inverses.
double inverse_residual(const DenseMatrix& A, const DenseMatrix& Ainv);

}  // namespace ol2r
