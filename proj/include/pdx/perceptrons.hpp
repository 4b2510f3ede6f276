#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pdx/dataset.hpp"
#include "pdx/operators.hpp"
#include "pdx/rng.hpp"
#include "pdx/spectral.hpp"
#include "pdx/vector.hpp"

namespace pdx {

enum class StepKind { kOption1, kOption2, kBatch, kQuad, kMulti, kGd, kStop };
enum class StopReason { kNone, kSeparated, kMaxIters, kStalled };

const char* to_string(StepKind kind);
const char* to_string(StopReason reason);

struct NoiseSpec {
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

struct IterateState {
  IterateState(RealVector theta0, std::uint64_t seed = 0) : theta(std::move(theta0)), rng(seed) {}

  RealVector theta;
  long t = 0;
  Rng rng;
  bool stopped = false;
  StopReason stop_reason = StopReason::kNone;
};

struct StepOutcome {
  std::vector<std::size_t> violated;  // {i : dot_products[i] <= 0}
  StepKind kind = StepKind::kStop;
  std::vector<double> dot_products;  // at theta_t, before the update
  // <v_mu_+, theta_t>^2 and <v_mu_-, theta_t>^2, two-sample steps only.
  std::optional<double> corr_mu_plus;
  std::optional<double> corr_mu_minus;
};

// z_1 = z_0 + (1 / 2n) sum_i y_i b_i.
RealVector batch_perceptron_init(const Dataset& data, const RealVector& z0);

// z_{t+1} = z_t + (phi / n) sum_{i in S_t} a_i with S_t = {i : a_i^T z_t <= 0}.
// `signed_features` holds a_i = y_i b_i. Empty S_t leaves z unchanged and
// reports kind kStop; t advances only when a step is taken.
StepOutcome batch_perceptron_step(IterateState& state, const std::vector<RealVector>& signed_features,
                                  double phi);
StepOutcome batch_perceptron_step(IterateState& state, const Dataset& data, double phi);

// theta_{t+1} = theta_t + (gamma / n) sum_{i in S_t} A_i theta_t + xi_t, with
// S_t = {i : theta^T A_i theta / 2 <= 0} and xi_t ~ N(0, sigma^2 I) drawn
// from state.rng. Empty S_t stops without drawing noise.
template <SymmetricOperator Op>
StepOutcome quad_perceptron_step(IterateState& state, const std::vector<Op>& operators, double gamma,
                                 const NoiseSpec& noise);

// The two-sample scheduler with bare gamma:
//   option 1 if theta^T A_1 theta <= 0:  theta + gamma A_1 theta + xi
//   option 2 else if theta^T A_2 theta <= 0:  theta + gamma A_2 theta + xi
//   stop otherwise.
StepOutcome two_sample_step(IterateState& state, const TwoSampleSpectrum& spectrum, double gamma,
                            const NoiseSpec& noise);

// theta_{t+1} = theta_t + (gamma_t / n) sum_{i in S_t} grad h_i(theta_t) with
// gamma_t = gamma / ||theta_t||^{l-1}, h_i = A_i[theta, ..., theta] / (l+1).
// Zero iterate is a DomainError.
StepOutcome generalized_perceptron_step(IterateState& state, const std::vector<MultiLinearMap>& maps,
                                        double gamma);

// True when gamma >= 1 / max_i ||A_i|| (power estimate); callers warn.
bool step_size_exceeds_limit(const std::vector<ConvOperator>& operators, double gamma);

struct TraceRecord {
  std::string run_id;
  std::string algo;
  long t = 0;
  double loss = 0.0;
  double accuracy = 0.0;
  double iterate_norm = 0.0;
  std::size_t violated_count = 0;
  std::optional<double> corr_mu_plus;
  std::string step_kind;
  double step_size = 0.0;
};

struct StopRule {
  long max_iters = 1000;
  // One record per iteration while t < dense_trace_until, then every
  // trace_stride-th iteration. The final iterate is always recorded.
  long trace_stride = 1;
  long dense_trace_until = 10000;
  bool record_trace = true;
  // Stop as stalled after this many consecutive bitwise-identical iterates.
  long stall_window = 100;
};

struct RunMeta {
  std::string run_id;
  std::string algo;
  double step_size = 0.0;
};

struct RunResult {
  IterateState state;
  std::vector<TraceRecord> trace;
};

using StepFunction = std::function<StepOutcome(IterateState&)>;

// Iterates `step` until it reports kStop (separated), max_iters steps were
// taken, or the iterate stalls. Step errors propagate; NumericError carries
// the iteration index. Trace loss is the mean of log(1 + exp(-dot_i)) over
// the outcome's dot products, accuracy the fraction of them > 0.
RunResult run_until(IterateState state, const StepFunction& step, const StopRule& rule,
                    const RunMeta& meta);

}  // namespace pdx
