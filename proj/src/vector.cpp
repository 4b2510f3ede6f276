#include "pdx/vector.hpp"

#include <algorithm>

namespace pdx {

RealVector::RealVector(std::size_t dim, double fill) : values_(dim, fill) {
  if (!std::isfinite(fill)) throw NumericError("RealVector: non-finite fill value");
}

RealVector::RealVector(std::initializer_list<double> values) : values_(values) {
  if (!all_finite(values_)) throw NumericError("RealVector: non-finite entry");
}

RealVector::RealVector(std::vector<double> values) : values_(std::move(values)) {
  if (!all_finite(values_)) throw NumericError("RealVector: non-finite entry");
}

RealVector RealVector::unit(std::size_t dim, std::size_t i) {
  if (i >= dim) throw DimensionError("RealVector::unit: index out of range");
  RealVector e(dim);
  e[i] = 1.0;
  return e;
}

RealVector& RealVector::operator+=(const RealVector& other) {
  require_same_size(size(), other.size(), "RealVector::operator+=");
  for (std::size_t i = 0; i < size(); ++i) values_[i] += other.values_[i];
  return *this;
}

RealVector& RealVector::operator-=(const RealVector& other) {
  require_same_size(size(), other.size(), "RealVector::operator-=");
  for (std::size_t i = 0; i < size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

RealVector& RealVector::operator*=(double s) noexcept {
  for (double& v : values_) v *= s;
  return *this;
}

RealVector operator+(RealVector lhs, const RealVector& rhs) { return lhs += rhs; }
RealVector operator-(RealVector lhs, const RealVector& rhs) { return lhs -= rhs; }
RealVector operator*(double s, RealVector v) { return v *= s; }
RealVector operator-(RealVector v) { return v *= -1.0; }

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double norm(std::span<const double> x) {
  // Scaled accumulation: iterates in the trace runs reach 1e150+.
  double scale = 0.0;
  for (double v : x) scale = std::max(scale, std::abs(v));
  if (scale == 0.0 || !std::isfinite(scale)) return scale;
  double s = 0.0;
  for (double v : x) {
    const double r = v / scale;
    s += r * r;
  }
  return scale * std::sqrt(s);
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

RealVector normalized(const RealVector& x) {
  const double n = norm(x);
  if (n == 0.0) throw DomainError("normalized: zero vector");
  RealVector out = x;
  out *= 1.0 / n;
  return out;
}

bool all_finite(std::span<const double> x) noexcept {
  return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

void ensure_finite(const RealVector& x, const std::string& context, long iteration) {
  if (!all_finite(x.span())) throw NumericError(context + ": non-finite value", iteration);
}

void require_same_size(std::size_t expected, std::size_t actual, const char* what) {
  if (expected != actual) {
    throw DimensionError(std::string(what) + ": expected dimension " + std::to_string(expected) +
                         ", got " + std::to_string(actual));
  }
}

}  // namespace pdx
