#pragma once

#include <concepts>
#include <cstddef>
#include <variant>
#include <vector>

#include "pdx/dense.hpp"
#include "pdx/vector.hpp"

namespace pdx {

inline constexpr std::size_t kDefaultDenseCap = 512;

// Circular shift one position to the right: out[0] = x[d-1], out[i] = x[i-1].
RealVector permute_right(const RealVector& x);
// P^m x for m >= 0.
RealVector permute_right(const RealVector& x, std::size_t m);

// y_i = sum_j c_j b_{i-j} (0-based, indices mod d); equivalently
// y = sum_j c_j P^j b. Requires 1 <= k <= d.
RealVector circular_conv(const RealVector& c, const RealVector& b);

// Symmetric (d+k)x(d+k) operator of the convolutional model
//
//   [ 0           (a)^T       ]
//   [ ...         (P^{k-1}a)^T]
//   [ a ... P^{k-1}a    0_d   ]
//
// acting on w = [c (k entries); v (d entries)], so that
// 1/2 w^T A w = (c * a)^T v.
class ConvOperator {
 public:
  ConvOperator(RealVector a, std::size_t kernel_size);

  const RealVector& feature() const noexcept { return a_; }
  std::size_t kernel_size() const noexcept { return k_; }
  std::size_t feature_dim() const noexcept { return a_.size(); }
  std::size_t dim() const noexcept { return a_.size() + k_; }

  RealVector apply(const RealVector& x) const;
  void apply(std::span<const double> x, std::span<double> out) const;
  // 1/2 w^T A w, computed in O(kd) without the bottom block.
  double quadratic_form(const RealVector& w) const;
  double quadratic_form(std::span<const double> w) const;
  DenseMatrix materialize(std::size_t cap = kDefaultDenseCap) const;

 private:
  RealVector a_;
  std::size_t k_;
};

// Operator of the two-layer model (C b)^T v with C in R^{f x d}:
//
//   [ 0_{fd}        a (x) I_f ]
//   [ a^T (x) I_f   0_f       ]
//
// acting on w = [vec(C) (column-major, fd entries); v (f entries)].
class TwoLayerOperator {
 public:
  TwoLayerOperator(RealVector a, std::size_t hidden_width);

  const RealVector& feature() const noexcept { return a_; }
  std::size_t hidden_width() const noexcept { return f_; }
  std::size_t feature_dim() const noexcept { return a_.size(); }
  std::size_t dim() const noexcept { return f_ * a_.size() + f_; }

  RealVector apply(const RealVector& x) const;
  void apply(std::span<const double> x, std::span<double> out) const;
  double quadratic_form(const RealVector& w) const;
  double quadratic_form(std::span<const double> w) const;
  DenseMatrix materialize(std::size_t cap = kDefaultDenseCap) const;

 private:
  RealVector a_;
  std::size_t f_;
};

template <typename Op>
concept SymmetricOperator = requires(const Op& op, const RealVector& x) {
  { op.dim() } -> std::convertible_to<std::size_t>;
  { op.apply(x) } -> std::same_as<RealVector>;
  { op.quadratic_form(x) } -> std::convertible_to<double>;
  { op.materialize() } -> std::same_as<DenseMatrix>;
};

using StructuredOperator = std::variant<ConvOperator, TwoLayerOperator>;

std::size_t dim(const StructuredOperator& op);
RealVector apply(const StructuredOperator& op, const RealVector& x);
double quadratic_form(const StructuredOperator& op, const RealVector& w);
DenseMatrix materialize_dense(const StructuredOperator& op, std::size_t cap = kDefaultDenseCap);

// Symmetric (l+1)-multilinear map of the deep linear model
//
//   m(b; C_1, ..., C_l, v) = (C_1 ... C_l b)^T v,
//   C_l in R^{f_l x d}, ..., C_1 in R^{f_1 x f_2}, v in R^{f_1},
//
// with parameters packed as w = [vec(C_1); ...; vec(C_l); v] (column-major
// vec). value(w) = A[w, ..., w] / (l+1) = (C_1 ... C_l a)^T v.
class MultiLinearMap {
 public:
  // layer_dims = (f_1, ..., f_l, d); l >= 1.
  MultiLinearMap(std::vector<std::size_t> layer_dims, RealVector a);

  std::size_t depth() const noexcept { return dims_.size() - 1; }
  std::size_t arity() const noexcept { return depth() + 1; }
  const std::vector<std::size_t>& layer_dims() const noexcept { return dims_; }
  const RealVector& feature() const noexcept { return a_; }
  std::size_t dim() const noexcept { return packed_size_; }

  double value(const RealVector& w) const;
  // Gradient of value(w), i.e. G[w, ..., w] (l-linear).
  RealVector grad(const RealVector& w) const;
  // Full symmetric form A[x_0, ..., x_l]. Cost grows as (l+1)!, meant for
  // property tests on small depths.
  double form(const std::vector<RealVector>& args) const;

  // Offset of block j (0..l-1 for C_{j+1}, l for v) in the packed vector.
  std::size_t block_offset(std::size_t block) const { return offsets_.at(block); }

 private:
  void check(const RealVector& w) const;
  // v^T B_1 ... B_l a where block j is read from blocks[j].
  double chain(const std::vector<const double*>& blocks) const;

  std::vector<std::size_t> dims_;
  RealVector a_;
  std::vector<std::size_t> offsets_;
  std::size_t packed_size_ = 0;
};

}  // namespace pdx
