#pragma once

#include "pdx/dense.hpp"
#include "pdx/vector.hpp"

namespace pdx {

struct SymmetricEigen {
  RealVector values;    // sorted descending
  DenseMatrix vectors;  // column i pairs with values[i]
  int sweeps = 0;
};

// Cyclic Jacobi eigensolver for small dense symmetric matrices. Sweeps until
// the off-diagonal Frobenius mass is <= tol * ||M||_F (absolute tol when M is
// zero). Rejects inputs above kDefaultDenseCap, inputs asymmetric beyond
// 1e-10 * max(1, ||M||_F), and throws NumericError after 100 sweeps.
SymmetricEigen dense_symmetric_eig(const DenseMatrix& m, double tol = 1e-14);

}  // namespace pdx
