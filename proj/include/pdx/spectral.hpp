#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "pdx/dataset.hpp"
#include "pdx/dense.hpp"
#include "pdx/operators.hpp"
#include "pdx/vector.hpp"

namespace pdx {

struct EigenPair {
  double value = 0.0;
  RealVector vector;  // closed-form, unnormalized
  RealVector unit;    // vector / ||vector||
};

enum class EigenCase { kZero, kShiftSymmetric, kShiftAntisymmetric, kGeneric };

const char* to_string(EigenCase c);

struct EigenSystem {
  EigenCase kind = EigenCase::kZero;
  std::vector<EigenPair> pairs;  // nonzero spectrum only: 0, 2 or 4 pairs
  std::size_t kernel_dim = 0;
};

inline constexpr double kCaseTolerance = 1e-12;

// Closed-form nonzero eigenpairs of the k = 2 convolution operator built from
// a. Case detection: ||a|| <= tol (zero), ||a - Pa|| <= tol ||a|| (a = Pa),
// ||a + Pa|| <= tol ||a|| (a = -Pa), otherwise generic with eigenvalues
// +-sqrt(||a||^2 +- a^T P a).
EigenSystem eigensystem_k2(const RealVector& a, double tol = kCaseTolerance);

// Spectral constants of the two-sample dataset. Vectors are unit length.
struct TwoSampleSpectrum {
  std::size_t d = 0;
  double mu = 0.0;
  double lambda1 = 0.0;  // sqrt(2d)
  double lambda2 = 0.0;  // sqrt((2 + mu)^2 + 2(d - 2))
  RealVector v1_plus, v1_minus;
  RealVector v2_plus, v2_minus;
  RealVector v_mu_plus, v_mu_minus;  // eigenvalues +mu / -mu of A_2, in ker(A_1)
  ConvOperator a1_op, a2_op;
};

TwoSampleSpectrum two_sample_spectrum(std::size_t d, double mu);

struct PowerResult {
  double estimate = 0.0;  // ||A x|| / ||x|| at the final iterate
  RealVector vector;
  int iterations = 0;
  bool converged = false;
};

using LinearMap = std::function<void(std::span<const double>, std::span<double>)>;

// Spectral norm of a symmetric operator by power iteration on A^2. Start
// vector is all-ones with a small deterministic index-dependent perturbation.
// Converged when ||A^2 x - rho x|| <= tol * rho for unit x.
PowerResult power_norm(const LinearMap& apply, std::size_t dim, double tol = 1e-8,
                       int max_iters = 10000);
PowerResult power_norm(const ConvOperator& op, double tol = 1e-8, int max_iters = 10000);
PowerResult power_norm(const DenseMatrix& m, double tol = 1e-8, int max_iters = 10000);

struct NormBounds {
  double lower = 0.0;
  double upper = 0.0;
  double estimate = 0.0;
  bool converged = false;
  int iterations = 0;
};

// lower = max(||sum_j P^j a|| / sqrt(k), ||a||), upper = sqrt(k) ||a||.
// estimate is the largest ||A x|| / ||x|| seen (power iterate or the
// lower-bound witness), so lower <= estimate <= ||A|| always holds.
NormBounds norm_bounds(const ConvOperator& op);

// gamma_max = 1 / max_i ||A_i|| for the conv(k) operators of the dataset.
// Uses the power estimate, falling back to sqrt(k) ||b_i|| when it did not
// converge.
double recommend_step_size(const Dataset& data, std::size_t kernel_size = 2);

// max_{||x|| <= 1} x^T B x for B = [[A, a e^T], [e a^T, b e e^T]] with
// e = ones(p), through the (d+1)-dimensional reduced matrix
// C = [[A, sqrt(p) a], [sqrt(p) a^T, p b]]. Clamped at 0 (x = 0 is feasible).
double reduce_block_quadratic(const DenseMatrix& block, const RealVector& a, double b,
                              std::size_t p);
// The reduced matrix C itself.
DenseMatrix reduced_block_matrix(const DenseMatrix& block, const RealVector& a, double b,
                                 std::size_t p);

}  // namespace pdx
