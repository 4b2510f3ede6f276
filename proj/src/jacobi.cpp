#include "pdx/jacobi.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "pdx/operators.hpp"

namespace pdx {

namespace {

double off_diagonal_mass(const DenseMatrix& a) {
  double s = 0.0;
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c)
      if (r != c) s += a(r, c) * a(r, c);
  return std::sqrt(s);
}

}  // namespace

SymmetricEigen dense_symmetric_eig(const DenseMatrix& m, double tol) {
  const std::size_t n = m.rows();
  if (n != m.cols()) throw DimensionError("dense_symmetric_eig: matrix is not square");
  if (n == 0) throw DimensionError("dense_symmetric_eig: empty matrix");
  if (n > kDefaultDenseCap) {
    throw DomainError("dense_symmetric_eig: dimension " + std::to_string(n) + " exceeds cap");
  }
  const double scale = m.frobenius_norm();
  if (m.asymmetry() > 1e-10 * std::max(1.0, scale)) {
    throw DomainError("dense_symmetric_eig: input is not symmetric");
  }

  DenseMatrix a = m;
  DenseMatrix v = DenseMatrix::identity(n);
  const double target = scale > 0.0 ? tol * scale : tol;

  int sweep = 0;
  while (off_diagonal_mass(a) > target) {
    if (++sweep > 100) throw NumericError("dense_symmetric_eig: no convergence after 100 sweeps");
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // Rotation angle from the stable formulation (Golub & Van Loan 8.5.2).
        const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

  SymmetricEigen out{RealVector(n), DenseMatrix(n, n), sweep};
  for (std::size_t i = 0; i < n; ++i) {
    out.values[i] = a(order[i], order[i]);
    for (std::size_t k = 0; k < n; ++k) out.vectors(k, i) = v(k, order[i]);
  }
  return out;
}

}  // namespace pdx
