#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "pdx/error.hpp"

namespace pdx {

// Dense real vector in double precision. Construction from values rejects
// NaN/Inf; element writes through operator[] are unchecked so hot loops stay
// cheap (use ensure_finite() at iteration boundaries).
class RealVector {
 public:
  RealVector() = default;
  explicit RealVector(std::size_t dim, double fill = 0.0);
  RealVector(std::initializer_list<double> values);
  explicit RealVector(std::vector<double> values);

  static RealVector zeros(std::size_t dim) { return RealVector(dim, 0.0); }
  static RealVector ones(std::size_t dim) { return RealVector(dim, 1.0); }
  // i-th coordinate vector (0-based).
  static RealVector unit(std::size_t dim, std::size_t i);

  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  double& operator[](std::size_t i) noexcept { return values_[i]; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

  std::span<double> span() noexcept { return values_; }
  std::span<const double> span() const noexcept { return values_; }
  const std::vector<double>& values() const noexcept { return values_; }

  auto begin() noexcept { return values_.begin(); }
  auto end() noexcept { return values_.end(); }
  auto begin() const noexcept { return values_.begin(); }
  auto end() const noexcept { return values_.end(); }

  bool operator==(const RealVector&) const = default;

  RealVector& operator+=(const RealVector& other);
  RealVector& operator-=(const RealVector& other);
  RealVector& operator*=(double s) noexcept;

 private:
  std::vector<double> values_;
};

RealVector operator+(RealVector lhs, const RealVector& rhs);
RealVector operator-(RealVector lhs, const RealVector& rhs);
RealVector operator*(double s, RealVector v);
RealVector operator-(RealVector v);

double dot(std::span<const double> x, std::span<const double> y);
inline double dot(const RealVector& x, const RealVector& y) {
  if (x.size() != y.size()) throw DimensionError("dot: dimension mismatch");
  return dot(x.span(), y.span());
}
double norm(std::span<const double> x);
inline double norm(const RealVector& x) { return norm(x.span()); }

// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
inline void axpy(double alpha, const RealVector& x, RealVector& y) {
  if (x.size() != y.size()) throw DimensionError("axpy: dimension mismatch");
  axpy(alpha, x.span(), y.span());
}

RealVector normalized(const RealVector& x);
bool all_finite(std::span<const double> x) noexcept;
// Throws NumericError naming `context` when x has a NaN/Inf entry.
void ensure_finite(const RealVector& x, const std::string& context, long iteration = -1);

void require_same_size(std::size_t expected, std::size_t actual, const char* what);

}  // namespace pdx
