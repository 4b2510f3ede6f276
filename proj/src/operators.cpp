#include "pdx/operators.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace pdx {

namespace {

void check_cap(std::size_t n, std::size_t cap) {
  if (n > cap) {
    throw DomainError("materialize_dense: dimension " + std::to_string(n) + " exceeds cap " +
                      std::to_string(cap));
  }
}

}  // namespace

RealVector permute_right(const RealVector& x) { return permute_right(x, 1); }

RealVector permute_right(const RealVector& x, std::size_t m) {
  if (x.empty()) throw DimensionError("permute_right: empty vector");
  const std::size_t d = x.size();
  m %= d;
  RealVector out(d);
  for (std::size_t i = 0; i < d; ++i) out[(i + m) % d] = x[i];
  return out;
}

RealVector circular_conv(const RealVector& c, const RealVector& b) {
  const std::size_t k = c.size();
  const std::size_t d = b.size();
  if (k == 0 || d == 0) throw DimensionError("circular_conv: empty input");
  if (k > d) {
    throw DomainError("circular_conv: kernel size " + std::to_string(k) +
                      " exceeds feature dimension " + std::to_string(d));
  }
  RealVector y(d);
  for (std::size_t j = 0; j < k; ++j) {
    const double cj = c[j];
    for (std::size_t i = 0; i < d; ++i) y[i] += cj * b[(i + d - j) % d];
  }
  return y;
}

// ---------------------------------------------------------------------------

ConvOperator::ConvOperator(RealVector a, std::size_t kernel_size)
    : a_(std::move(a)), k_(kernel_size) {
  if (a_.empty()) throw DimensionError("ConvOperator: empty feature vector");
  if (k_ < 2) throw DomainError("ConvOperator: kernel size must be >= 2");
  if (k_ > a_.size()) {
    throw DomainError("ConvOperator: kernel size " + std::to_string(k_) +
                      " exceeds feature dimension " + std::to_string(a_.size()));
  }
}

RealVector ConvOperator::apply(const RealVector& x) const {
  require_same_size(dim(), x.size(), "ConvOperator::apply");
  RealVector out(dim());
  apply(x.span(), out.span());
  return out;
}

void ConvOperator::apply(std::span<const double> x, std::span<double> out) const {
  const std::size_t d = a_.size();
  const double* a = a_.values().data();
  const double* x1 = x.data();
  const double* x2 = x.data() + k_;
  double* top = out.data();
  double* bottom = out.data() + k_;

  // top_j = (P^j a)^T x2 = sum_i a_{i-j} x2_i
  for (std::size_t j = 0; j < k_; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < j; ++i) s += a[i + d - j] * x2[i];
    for (std::size_t i = j; i < d; ++i) s += a[i - j] * x2[i];
    top[j] = s;
  }
  // bottom = sum_j x1_j P^j a
  std::fill(bottom, bottom + d, 0.0);
  for (std::size_t j = 0; j < k_; ++j) {
    const double cj = x1[j];
    if (cj == 0.0) continue;
    for (std::size_t i = 0; i < j; ++i) bottom[i] += cj * a[i + d - j];
    for (std::size_t i = j; i < d; ++i) bottom[i] += cj * a[i - j];
  }
}

double ConvOperator::quadratic_form(const RealVector& w) const {
  require_same_size(dim(), w.size(), "ConvOperator::quadratic_form");
  return quadratic_form(w.span());
}

double ConvOperator::quadratic_form(std::span<const double> w) const {
  const std::size_t d = a_.size();
  const double* a = a_.values().data();
  const double* v = w.data() + k_;
  double total = 0.0;
  for (std::size_t j = 0; j < k_; ++j) {
    if (w[j] == 0.0) continue;
    double s = 0.0;
    for (std::size_t i = 0; i < j; ++i) s += a[i + d - j] * v[i];
    for (std::size_t i = j; i < d; ++i) s += a[i - j] * v[i];
    total += w[j] * s;
  }
  return total;
}

DenseMatrix ConvOperator::materialize(std::size_t cap) const {
  check_cap(dim(), cap);
  const std::size_t d = a_.size();
  DenseMatrix m(dim(), dim());
  for (std::size_t j = 0; j < k_; ++j) {
    for (std::size_t i = 0; i < d; ++i) {
      const double value = a_[(i + d - j) % d];
      m(j, k_ + i) = value;
      m(k_ + i, j) = value;
    }
  }
  return m;
}

// ---------------------------------------------------------------------------

TwoLayerOperator::TwoLayerOperator(RealVector a, std::size_t hidden_width)
    : a_(std::move(a)), f_(hidden_width) {
  if (a_.empty()) throw DimensionError("TwoLayerOperator: empty feature vector");
  if (f_ == 0) throw DomainError("TwoLayerOperator: hidden width must be positive");
}

RealVector TwoLayerOperator::apply(const RealVector& x) const {
  require_same_size(dim(), x.size(), "TwoLayerOperator::apply");
  RealVector out(dim());
  apply(x.span(), out.span());
  return out;
}

void TwoLayerOperator::apply(std::span<const double> x, std::span<double> out) const {
  const std::size_t d = a_.size();
  const double* c = x.data();
  const double* v = x.data() + f_ * d;
  double* top = out.data();
  double* bottom = out.data() + f_ * d;
  std::fill(bottom, bottom + f_, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    const double aj = a_[j];
    for (std::size_t r = 0; r < f_; ++r) {
      top[j * f_ + r] = aj * v[r];
      bottom[r] += aj * c[j * f_ + r];
    }
  }
}

double TwoLayerOperator::quadratic_form(const RealVector& w) const {
  require_same_size(dim(), w.size(), "TwoLayerOperator::quadratic_form");
  return quadratic_form(w.span());
}

double TwoLayerOperator::quadratic_form(std::span<const double> w) const {
  const std::size_t d = a_.size();
  const double* c = w.data();
  const double* v = w.data() + f_ * d;
  double total = 0.0;
  for (std::size_t r = 0; r < f_; ++r) {
    double ca = 0.0;
    for (std::size_t j = 0; j < d; ++j) ca += c[j * f_ + r] * a_[j];
    total += ca * v[r];
  }
  return total;
}

DenseMatrix TwoLayerOperator::materialize(std::size_t cap) const {
  check_cap(dim(), cap);
  const std::size_t d = a_.size();
  DenseMatrix m(dim(), dim());
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t r = 0; r < f_; ++r) {
      m(j * f_ + r, f_ * d + r) = a_[j];
      m(f_ * d + r, j * f_ + r) = a_[j];
    }
  }
  return m;
}

// ---------------------------------------------------------------------------

std::size_t dim(const StructuredOperator& op) {
  return std::visit([](const auto& o) { return o.dim(); }, op);
}

RealVector apply(const StructuredOperator& op, const RealVector& x) {
  return std::visit([&](const auto& o) { return o.apply(x); }, op);
}

double quadratic_form(const StructuredOperator& op, const RealVector& w) {
  return std::visit([&](const auto& o) { return o.quadratic_form(w); }, op);
}

DenseMatrix materialize_dense(const StructuredOperator& op, std::size_t cap) {
  return std::visit([&](const auto& o) { return o.materialize(cap); }, op);
}

// ---------------------------------------------------------------------------

MultiLinearMap::MultiLinearMap(std::vector<std::size_t> layer_dims, RealVector a)
    : dims_(std::move(layer_dims)), a_(std::move(a)) {
  if (dims_.size() < 2) throw DomainError("MultiLinearMap: need at least one layer");
  if (std::any_of(dims_.begin(), dims_.end(), [](std::size_t v) { return v == 0; }))
    throw DomainError("MultiLinearMap: layer dimensions must be positive");
  require_same_size(dims_.back(), a_.size(), "MultiLinearMap feature");
  std::size_t offset = 0;
  for (std::size_t j = 0; j + 1 < dims_.size(); ++j) {
    offsets_.push_back(offset);
    offset += dims_[j] * dims_[j + 1];
  }
  offsets_.push_back(offset);
  packed_size_ = offset + dims_[0];
}

void MultiLinearMap::check(const RealVector& w) const {
  if (w.size() != packed_size_) {
    throw DimensionError("MultiLinearMap: packed length " + std::to_string(w.size()) +
                         " does not match layout length " + std::to_string(packed_size_));
  }
}

double MultiLinearMap::chain(const std::vector<const double*>& blocks) const {
  const std::size_t l = depth();
  std::vector<double> u(a_.begin(), a_.end());
  std::vector<double> next;
  for (std::size_t j = l; j-- > 0;) {
    const std::size_t rows = dims_[j];
    const std::size_t cols = dims_[j + 1];
    const double* c = blocks[j];
    next.assign(rows, 0.0);
    for (std::size_t col = 0; col < cols; ++col) {
      const double uc = u[col];
      for (std::size_t r = 0; r < rows; ++r) next[r] += c[col * rows + r] * uc;
    }
    u.swap(next);
  }
  return dot(std::span<const double>(blocks[l], dims_[0]), std::span<const double>(u));
}

double MultiLinearMap::value(const RealVector& w) const {
  check(w);
  std::vector<const double*> blocks;
  for (std::size_t offset : offsets_) blocks.push_back(w.values().data() + offset);
  return chain(blocks);
}

RealVector MultiLinearMap::grad(const RealVector& w) const {
  check(w);
  const std::size_t l = depth();
  const double* base = w.values().data();

  // forward[j] = C_{j+1} ... C_l a  (forward[l] = a)
  std::vector<std::vector<double>> forward(l + 1);
  forward[l].assign(a_.begin(), a_.end());
  for (std::size_t j = l; j-- > 0;) {
    const std::size_t rows = dims_[j];
    const std::size_t cols = dims_[j + 1];
    const double* c = base + offsets_[j];
    forward[j].assign(rows, 0.0);
    for (std::size_t col = 0; col < cols; ++col)
      for (std::size_t r = 0; r < rows; ++r) forward[j][r] += c[col * rows + r] * forward[j + 1][col];
  }
  // backward[j] = C_j^T ... C_1^T v  (backward[0] = v)
  std::vector<std::vector<double>> backward(l + 1);
  backward[0].assign(base + offsets_[l], base + offsets_[l] + dims_[0]);
  for (std::size_t j = 0; j < l; ++j) {
    const std::size_t rows = dims_[j];
    const std::size_t cols = dims_[j + 1];
    const double* c = base + offsets_[j];
    backward[j + 1].assign(cols, 0.0);
    for (std::size_t col = 0; col < cols; ++col) {
      double s = 0.0;
      for (std::size_t r = 0; r < rows; ++r) s += c[col * rows + r] * backward[j][r];
      backward[j + 1][col] = s;
    }
  }

  RealVector g(packed_size_);
  for (std::size_t j = 0; j < l; ++j) {
    const std::size_t rows = dims_[j];
    const std::size_t cols = dims_[j + 1];
    double* out = g.span().data() + offsets_[j];
    for (std::size_t col = 0; col < cols; ++col)
      for (std::size_t r = 0; r < rows; ++r) out[col * rows + r] = backward[j][r] * forward[j + 1][col];
  }
  std::copy(forward[0].begin(), forward[0].end(), g.span().data() + offsets_[l]);
  return g;
}

double MultiLinearMap::form(const std::vector<RealVector>& args) const {
  const std::size_t blocks = arity();
  if (args.size() != blocks) throw DimensionError("MultiLinearMap::form: wrong number of arguments");
  for (const RealVector& x : args) check(x);

  std::vector<std::size_t> perm(blocks);
  std::iota(perm.begin(), perm.end(), 0);
  double total = 0.0;
  double count = 0.0;
  std::vector<const double*> pointers(blocks);
  do {
    for (std::size_t j = 0; j < blocks; ++j) pointers[j] = args[perm[j]].values().data() + offsets_[j];
    total += chain(pointers);
    count += 1.0;
  } while (std::next_permutation(perm.begin(), perm.end()));
  // (l+1)! terms, normalized by l! so that form(w, ..., w) = (l+1) value(w).
  return total * static_cast<double>(blocks) / count;
}

}  // namespace pdx
