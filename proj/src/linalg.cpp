#include "ol2r/linalg.hpp"

#include <cmath>

#include "ol2r/errors.hpp"

namespace ol2r {

DenseMatrix DenseMatrix::identity_scaled(int n, double s) {
  DenseMatrix m(n);
  for (int i = 0; i < n; ++i) m.at(i, i) = s;
  return m;
}

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

void matvec(const DenseMatrix& A, std::span<const double> x,
            std::span<double> out) {
  for (int i = 0; i < A.n; ++i) {
    const double* r = A.row(i);
    double s = 0.0;
    for (int j = 0; j < A.n; ++j) s += r[j] * x[static_cast<std::size_t>(j)];
    out[static_cast<std::size_t>(i)] = s;
  }
}

double quadform(const DenseMatrix& A, std::span<const double> v) {
  double total = 0.0;
  for (int i = 0; i < A.n; ++i) {
    const double* r = A.row(i);
    double s = 0.0;
    for (int j = 0; j < A.n; ++j) s += r[j] * v[static_cast<std::size_t>(j)];
    total += v[static_cast<std::size_t>(i)] * s;
  }
  return total;
}

void rank_one_update(DenseMatrix& A, std::span<const double> v, double w) {
  for (int i = 0; i < A.n; ++i) {
    double* r = A.row(i);
    const double c = w * v[static_cast<std::size_t>(i)];
    for (int j = 0; j < A.n; ++j) r[j] += c * v[static_cast<std::size_t>(j)];
  }
}

double sherman_morrison_update(DenseMatrix& Ainv, std::span<const double> v) {
  const int n = Ainv.n;
  std::vector<double> u(static_cast<std::size_t>(n));
  matvec(Ainv, v, u);
  double denom = 1.0 + dot(v, u);
  // A PSD rank-one addition keeps denom >= 1; anything else means the
  // maintained inverse has degenerated.
  if (!(denom > 0.0))
    throw CovarianceError("sherman_morrison_update: non-positive denominator");
  const double scale = 1.0 / denom;
  for (int i = 0; i < n; ++i) {
    double* r = Ainv.row(i);
    const double c = scale * u[static_cast<std::size_t>(i)];
    for (int j = 0; j < n; ++j) r[j] -= c * u[static_cast<std::size_t>(j)];
  }
  return denom;
}

DenseMatrix cholesky_factor(const DenseMatrix& A) {
  const int n = A.n;
  DenseMatrix L(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = A.at(i, j);
      const double* li = L.row(i);
      const double* lj = L.row(j);
      for (int k = 0; k < j; ++k) s -= li[k] * lj[k];
      if (i == j) {
        if (!(s > 0.0))
          throw CovarianceError(
              "cholesky_factor: matrix not positive definite (lambda too "
              "small?)");
        L.at(i, i) = std::sqrt(s);
      } else {
        L.at(i, j) = s / L.at(j, j);
      }
    }
  }
  return L;
}

double cholesky_logdet(const DenseMatrix& A) {
  DenseMatrix L = cholesky_factor(A);
  double ld = 0.0;
  for (int i = 0; i < A.n; ++i) ld += std::log(L.at(i, i));
  return 2.0 * ld;
}

DenseMatrix cholesky_inverse(const DenseMatrix& A) {
  const int n = A.n;
  DenseMatrix L = cholesky_factor(A);
  DenseMatrix inv(n);
  std::vector<double> y(static_cast<std::size_t>(n));
  // Solve A x = e_k column by column.
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      double s = (i == k) ? 1.0 : 0.0;
      const double* li = L.row(i);
      for (int j = 0; j < i; ++j) s -= li[j] * y[static_cast<std::size_t>(j)];
      y[static_cast<std::size_t>(i)] = s / L.at(i, i);
    }
    for (int i = n - 1; i >= 0; --i) {
      double s = y[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < n; ++j) s -= L.at(j, i) * inv.at(j, k);
      inv.at(i, k) = s / L.at(i, i);
    }
  }
  return inv;
}

double inverse_residual(const DenseMatrix& A, const DenseMatrix& Ainv) {
  const int n = A.n;
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      const double* r = A.row(i);
      for (int k = 0; k < n; ++k) s += r[k] * Ainv.at(k, j);
      if (i == j) s -= 1.0;
      worst = std::max(worst, std::fabs(s));
    }
  }
  return worst;
}

}  // namespace ol2r
