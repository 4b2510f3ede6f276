#pragma once

#include <cstdint>
#include <vector>

#include "pdx/dataset.hpp"
#include "pdx/operators.hpp"
#include "pdx/vector.hpp"

namespace pdx {

// Step-count bound and parameters of the noisy two-sample quadratic
// perceptron's high-probability termination guarantee. All logs natural.
struct TheoremParams {
  std::size_t d = 0;
  double mu = 0.0;
  double rho = 0.0;
  RealVector theta0;
  double corr = 0.0;      // <theta0, v_mu_+> with unit v_mu_+
  double A_const = 0.0;   // 2^27 log(2^62 |theta0|^2 / (rho^3 corr^2)) log(2^15 sqrt(d) |theta0|^2 / (mu corr^2))
  double B_const = 0.0;   // A log(sqrt(d) A / mu)
  double T = 0.0;         // ceil(B sqrt(d) / mu), integer-valued
  double gamma = 0.0;     // 1 / (4 sqrt(d))
  double sigma = 0.0;     // |corr| / (4096 T sqrt(max(d, log(T / rho))))
};

// Rejects mu > 1/10, rho outside (0, 1), d < 3, a theta0 of the wrong size and
// |<theta0, v_mu_+>| < 1e-300, naming the violated clause.
TheoremParams theorem_params(std::size_t d, double mu, double rho, const RealVector& theta0);

struct ReductionReport {
  std::vector<double> scales;           // ||w_0|| (quadratic) or gamma (linear)
  std::vector<double> direction_gaps;   // per scale, max over the horizon
  std::vector<double> sign_agreement;   // per scale, fraction of (i, t) with equal predictions
  std::vector<double> reference_norms;  // per scale, max_t ||z_t|| (linear) or 1 (quadratic)
};

// GD on the conv(k) logistic loss from w_0 = s * theta0/||theta0|| against the
// noise-free quadratic perceptron from theta0, for each s in `norms`.
// gap = max_{t <= horizon} || w_t/||w_t|| - theta_t/||theta_t|| ||.
// Requires |theta0^T A_i theta0| > 1e-12 ||theta0||^2 for every i and
// gamma < 1 / max_i ||A_i||.
ReductionReport reduction_check_quadratic(const Dataset& data, const RealVector& theta0, double gamma,
                                          const std::vector<double>& norms, long horizon,
                                          std::size_t kernel_size = 2);

// Linear-model GD from w_0 = 0 at each gamma against the batch perceptron
// (phi = 1, z_1 = (1/2n) sum_i a_i). gap = max_{1 <= t <= horizon} ||w_t/gamma - z_t||.
ReductionReport reduction_check_linear(const Dataset& data, const std::vector<double>& gammas,
                                       long horizon);

// True when each gap is <= the previous one, treating gaps below `floor` as
// equal (roundoff level).
bool gaps_monotone(const std::vector<double>& gaps, double floor = 1e-12);

struct LowerBoundTrace {
  std::size_t d = 0;
  double mu = 0.0;
  RealVector z0;
  // z_1, z_2, ... for the first `store_limit` steps (the deviation below
  // covers every step).
  std::vector<RealVector> analytic;   // closed form
  std::vector<RealVector> simulated;  // batch perceptron
  double max_deviation = 0.0;         // max_t max_j |analytic - simulated|
  double max_scaled_deviation = 0.0;  // same, divided by max(1, |analytic_j|)
  long first_separation_step = -1;    // index t of the first separating z_t, -1 if none within max_k
  long bound = 0;                     // 2 ceil(d / (2 mu))
};

// Batch perceptron (phi = 1) on the two-sample dataset from z_0, replayed
// against the alternating closed form
//   z_1 = z_0 - (mu/4) e_1,
//   z_2k = z_0 + (1/2) ones - (1/4 + (k-1)/2) mu e_1,
//   z_2k+1 = z_0 - (1/4 + k/2) mu e_1,
// for at most max_k periods. Requires d >= 3, 0 < mu <= 1/2 and
// ||z_0|| <= mu / (8 max_i ||a_i||).
LowerBoundTrace lower_bound_replay(std::size_t d, double mu, const RealVector& z0, long max_k,
                                   std::size_t store_limit = 1000);

// Unit vector in the intersection of ker(A_i): a seeded Gaussian draw
// projected off every eigenvector of every A_i with |lambda| > 1e-10 ||A_i||
// (dense Jacobi oracle). Requires n < (d + 2) / 4 for conv(2) operators.
// Throws NumericError when the projection vanishes or a residual
// ||A_i theta|| exceeds 1e-10.
RealVector null_space_start(const std::vector<ConvOperator>& operators, std::uint64_t seed);

// Same subspace, computed by exact rational elimination. Every feature entry
// must be an integer multiple of 2^-16 below 2^15 in magnitude. Returns a
// random small-integer combination of an integer kernel basis scaled by a
// power of two to norm in [1/2, 1), so every A_i theta evaluates to exactly
// zero in floating point. Throws NumericError if that check fails.
RealVector exact_null_space_start(const std::vector<ConvOperator>& operators, std::uint64_t seed);

}  // namespace pdx
