#include "pdx/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pdx/jacobi.hpp"

namespace pdx {

const char* to_string(EigenCase c) {
  switch (c) {
    case EigenCase::kZero: return "zero";
    case EigenCase::kShiftSymmetric: return "P-symmetric";
    case EigenCase::kShiftAntisymmetric: return "P-antisymmetric";
    case EigenCase::kGeneric: return "generic";
  }
  return "?";
}

namespace {

EigenPair make_pair(double value, double head0, double head1, const RealVector& tail) {
  std::vector<double> raw;
  raw.reserve(tail.size() + 2);
  raw.push_back(head0);
  raw.push_back(head1);
  raw.insert(raw.end(), tail.begin(), tail.end());
  RealVector vec(std::move(raw));
  RealVector unit = normalized(vec);
  return EigenPair{value, std::move(vec), std::move(unit)};
}

}  // namespace

EigenSystem eigensystem_k2(const RealVector& a, double tol) {
  if (a.empty()) throw DimensionError("eigensystem_k2: empty feature vector");
  const std::size_t total = a.size() + 2;
  const double na = norm(a);
  EigenSystem sys;
  if (na <= tol) {
    sys.kind = EigenCase::kZero;
    sys.kernel_dim = total;
    return sys;
  }

  const RealVector pa = permute_right(a);
  const RealVector sum = a + pa;
  const RealVector diff = a - pa;
  const double sqrt2 = std::sqrt(2.0);

  if (norm(diff) <= tol * na) {
    sys.kind = EigenCase::kShiftSymmetric;
    const RealVector tail = sqrt2 * a;
    sys.pairs.push_back(make_pair(sqrt2 * na, na, na, tail));
    sys.pairs.push_back(make_pair(-sqrt2 * na, -na, -na, tail));
  } else if (norm(sum) <= tol * na) {
    sys.kind = EigenCase::kShiftAntisymmetric;
    const RealVector tail = sqrt2 * a;
    sys.pairs.push_back(make_pair(sqrt2 * na, na, -na, tail));
    sys.pairs.push_back(make_pair(-sqrt2 * na, -na, na, tail));
  } else {
    sys.kind = EigenCase::kGeneric;
    const double n2 = na * na;
    const double cross = dot(a, pa);
    const double plus = std::sqrt(std::max(0.0, n2 + cross));
    const double minus = std::sqrt(std::max(0.0, n2 - cross));
    sys.pairs.push_back(make_pair(plus, plus, plus, sum));
    sys.pairs.push_back(make_pair(-plus, -plus, -plus, sum));
    sys.pairs.push_back(make_pair(minus, minus, -minus, diff));
    sys.pairs.push_back(make_pair(-minus, -minus, minus, diff));
  }
  sys.kernel_dim = total - sys.pairs.size();
  return sys;
}

TwoSampleSpectrum two_sample_spectrum(std::size_t d, double mu) {
  if (d < 3) throw DomainError("two_sample_spectrum: d must be >= 3");
  if (!(mu > 0.0)) throw DomainError("two_sample_spectrum: mu must be > 0");
  const Dataset data = make_two_sample(d, mu);
  RealVector a1 = data.signed_feature(0);
  RealVector a2 = data.signed_feature(1);

  const EigenSystem s1 = eigensystem_k2(a1);
  const EigenSystem s2 = eigensystem_k2(a2);
  if (s1.pairs.size() != 2 || s2.pairs.size() != 4) {
    throw NumericError("two_sample_spectrum: unexpected eigen case");
  }

  TwoSampleSpectrum out{
      .d = d,
      .mu = mu,
      .lambda1 = std::sqrt(2.0 * static_cast<double>(d)),
      .lambda2 = std::sqrt((2.0 + mu) * (2.0 + mu) + 2.0 * (static_cast<double>(d) - 2.0)),
      .v1_plus = s1.pairs[0].unit,
      .v1_minus = s1.pairs[1].unit,
      .v2_plus = s2.pairs[0].unit,
      .v2_minus = s2.pairs[1].unit,
      .v_mu_plus = s2.pairs[2].unit,
      .v_mu_minus = s2.pairs[3].unit,
      .a1_op = ConvOperator(std::move(a1), 2),
      .a2_op = ConvOperator(std::move(a2), 2),
  };

  // v_mu_+- must lie in ker(A_1).
  for (const RealVector* v : {&out.v_mu_plus, &out.v_mu_minus}) {
    if (norm(out.a1_op.apply(*v)) > 1e-10 * norm(*v)) {
      throw NumericError("two_sample_spectrum: v_mu not in ker(A_1)");
    }
  }
  return out;
}

PowerResult power_norm(const LinearMap& apply, std::size_t dim, double tol, int max_iters) {
  if (dim == 0) throw DimensionError("power_norm: empty operator");
  RealVector x(dim);
  for (std::size_t i = 0; i < dim; ++i) x[i] = 1.0 + 1e-3 * std::sin(1.0 + static_cast<double>(i));
  x *= 1.0 / norm(x);

  RealVector ax(dim);
  RealVector aax(dim);
  PowerResult result;
  for (int it = 1; it <= max_iters; ++it) {
    apply(x.span(), ax.span());
    apply(ax.span(), aax.span());
    const double ax_norm = norm(ax);
    result.iterations = it;
    if (ax_norm == 0.0) {
      // x in the kernel: either A = 0 or an unlucky start. Both report 0.
      result.estimate = 0.0;
      result.vector = x;
      result.converged = norm(aax) == 0.0;
      return result;
    }
    result.estimate = std::max(result.estimate, ax_norm);
    const double rho = ax_norm * ax_norm;  // x^T A^2 x for unit x
    RealVector residual = aax;
    axpy(-rho, x, residual);
    const double aax_norm = norm(aax);
    x = aax;
    x *= 1.0 / aax_norm;
    if (norm(residual) <= tol * rho) {
      apply(x.span(), ax.span());
      result.estimate = std::max(result.estimate, norm(ax));
      result.vector = x;
      result.converged = true;
      return result;
    }
  }
  result.vector = x;
  return result;
}

PowerResult power_norm(const ConvOperator& op, double tol, int max_iters) {
  return power_norm([&op](std::span<const double> in, std::span<double> out) { op.apply(in, out); },
                    op.dim(), tol, max_iters);
}

PowerResult power_norm(const DenseMatrix& m, double tol, int max_iters) {
  if (m.rows() != m.cols()) throw DimensionError("power_norm: matrix is not square");
  const std::size_t n = m.rows();
  return power_norm(
      [&m, n](std::span<const double> in, std::span<double> out) {
        for (std::size_t r = 0; r < n; ++r) {
          double s = 0.0;
          for (std::size_t c = 0; c < n; ++c) s += m(r, c) * in[c];
          out[r] = s;
        }
      },
      n, tol, max_iters);
}

NormBounds norm_bounds(const ConvOperator& op) {
  const RealVector& a = op.feature();
  const std::size_t k = op.kernel_size();
  const double na = norm(a);
  const double sqrt_k = std::sqrt(static_cast<double>(k));

  RealVector shifted_sum(a.size());
  for (std::size_t j = 0; j < k; ++j) shifted_sum += permute_right(a, j);

  NormBounds out;
  out.upper = sqrt_k * na;
  out.lower = std::max(norm(shifted_sum) / sqrt_k, na);

  const PowerResult power = power_norm(op);
  out.converged = power.converged;
  out.iterations = power.iterations;
  // The witness x = [ones(k)/sqrt(k); 0] and x = [0; a/||a||] both attain the
  // lower bound, so the estimate is never below it.
  out.estimate = std::max(power.estimate, out.lower);
  return out;
}

double recommend_step_size(const Dataset& data, std::size_t kernel_size) {
  double worst = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const ConvOperator op(data.signed_feature(i), kernel_size);
    const NormBounds bounds = norm_bounds(op);
    worst = std::max(worst, bounds.converged ? bounds.estimate : bounds.upper);
  }
  if (worst == 0.0) throw DomainError("recommend_step_size: all features are zero");
  return 1.0 / worst;
}

DenseMatrix reduced_block_matrix(const DenseMatrix& block, const RealVector& a, double b,
                                 std::size_t p) {
  const std::size_t d = block.rows();
  if (block.cols() != d) throw DimensionError("reduce_block_quadratic: block is not square");
  require_same_size(d, a.size(), "reduce_block_quadratic");
  if (p == 0) throw DomainError("reduce_block_quadratic: p must be >= 1");
  const double sp = std::sqrt(static_cast<double>(p));
  DenseMatrix c(d + 1, d + 1);
  for (std::size_t r = 0; r < d; ++r) {
    for (std::size_t col = 0; col < d; ++col) c(r, col) = block(r, col);
    c(r, d) = sp * a[r];
    c(d, r) = sp * a[r];
  }
  c(d, d) = static_cast<double>(p) * b;
  return c;
}

double reduce_block_quadratic(const DenseMatrix& block, const RealVector& a, double b,
                              std::size_t p) {
  const SymmetricEigen eig = dense_symmetric_eig(reduced_block_matrix(block, a, b, p));
  return std::max(0.0, eig.values[0]);
}

}  // namespace pdx
