#pragma once

#include <cstddef>
#include <vector>

#include "pdx/vector.hpp"

namespace pdx {

// Small row-major dense matrix. Used for oracles (materialized operators,
// Hessians, Jacobi) only; the training paths never form one.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static DenseMatrix identity(std::size_t n);
  static DenseMatrix diagonal(const RealVector& diag);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  RealVector apply(const RealVector& x) const;
  RealVector column(std::size_t c) const;
  DenseMatrix transposed() const;

  double frobenius_norm() const;
  // max |M(r,c) - M(c,r)|
  double asymmetry() const;

  DenseMatrix& operator+=(const DenseMatrix& other);
  DenseMatrix& operator*=(double s);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b);
// x y^T
DenseMatrix outer(const RealVector& x, const RealVector& y);

}  // namespace pdx
