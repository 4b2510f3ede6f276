#include "pdx/perceptrons.hpp"

#include <cmath>

#include "pdx/models.hpp"

namespace pdx {

const char* to_string(StepKind kind) {
  switch (kind) {
    case StepKind::kOption1: return "option1";
    case StepKind::kOption2: return "option2";
    case StepKind::kBatch: return "batch";
    case StepKind::kQuad: return "quad";
    case StepKind::kMulti: return "multi";
    case StepKind::kGd: return "gd";
    case StepKind::kStop: return "stop";
  }
  return "?";
}

const char* to_string(StopReason reason) {
  switch (reason) {
    case StopReason::kNone: return "none";
    case StopReason::kSeparated: return "separated";
    case StopReason::kMaxIters: return "max_iters";
    case StopReason::kStalled: return "stalled";
  }
  return "?";
}

namespace {

void add_noise(IterateState& state, const NoiseSpec& noise) {
  if (noise.sigma < 0.0 || !std::isfinite(noise.sigma)) throw DomainError("noise: sigma must be >= 0");
  if (noise.sigma == 0.0) return;
  for (double& x : state.theta) x += noise.sigma * state.rng.normal();
}

void finish_step(IterateState& state, const char* what) {
  if (!all_finite(state.theta.span())) throw NumericError(std::string(what) + ": non-finite iterate", state.t);
  ++state.t;
}

}  // namespace

RealVector batch_perceptron_init(const Dataset& data, const RealVector& z0) {
  require_same_size(data.dim(), z0.size(), "batch_perceptron_init");
  RealVector z = z0;
  const double scale = 1.0 / (2.0 * static_cast<double>(data.size()));
  for (std::size_t i = 0; i < data.size(); ++i) axpy(scale, data.signed_feature(i), z);
  return z;
}

StepOutcome batch_perceptron_step(IterateState& state, const std::vector<RealVector>& a, double phi) {
  StepOutcome out;
  out.dot_products.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double dp = dot(a[i], state.theta);
    out.dot_products.push_back(dp);
    if (dp <= 0.0) out.violated.push_back(i);
  }
  if (out.violated.empty()) return out;
  out.kind = StepKind::kBatch;
  const double scale = phi / static_cast<double>(a.size());
  for (std::size_t i : out.violated) axpy(scale, a[i], state.theta);
  finish_step(state, "batch_perceptron_step");
  return out;
}

StepOutcome batch_perceptron_step(IterateState& state, const Dataset& data, double phi) {
  return batch_perceptron_step(state, data.signed_features(), phi);
}

template <SymmetricOperator Op>
StepOutcome quad_perceptron_step(IterateState& state, const std::vector<Op>& operators, double gamma,
                                 const NoiseSpec& noise) {
  StepOutcome out;
  out.dot_products.reserve(operators.size());
  std::vector<RealVector> images;
  images.reserve(operators.size());
  for (std::size_t i = 0; i < operators.size(); ++i) {
    RealVector image = operators[i].apply(state.theta);
    const double q = 0.5 * dot(state.theta, image);
    out.dot_products.push_back(q);
    if (q <= 0.0) {
      out.violated.push_back(i);
      images.push_back(std::move(image));
    }
  }
  if (out.violated.empty()) return out;
  out.kind = StepKind::kQuad;
  const double scale = gamma / static_cast<double>(operators.size());
  // All images are taken at theta_t before any of them is added.
  for (const RealVector& image : images) axpy(scale, image, state.theta);
  add_noise(state, noise);
  finish_step(state, "quad_perceptron_step");
  return out;
}

template StepOutcome quad_perceptron_step<ConvOperator>(IterateState&, const std::vector<ConvOperator>&,
                                                        double, const NoiseSpec&);
template StepOutcome quad_perceptron_step<TwoLayerOperator>(IterateState&,
                                                            const std::vector<TwoLayerOperator>&, double,
                                                            const NoiseSpec&);

StepOutcome two_sample_step(IterateState& state, const TwoSampleSpectrum& spectrum, double gamma,
                            const NoiseSpec& noise) {
  StepOutcome out;
  const double cp = dot(spectrum.v_mu_plus, state.theta);
  const double cm = dot(spectrum.v_mu_minus, state.theta);
  out.corr_mu_plus = cp * cp;
  out.corr_mu_minus = cm * cm;

  RealVector image1 = spectrum.a1_op.apply(state.theta);
  const double q1 = 0.5 * dot(state.theta, image1);
  RealVector image2 = spectrum.a2_op.apply(state.theta);
  const double q2 = 0.5 * dot(state.theta, image2);
  out.dot_products = {q1, q2};
  if (q1 <= 0.0) out.violated.push_back(0);
  if (q2 <= 0.0) out.violated.push_back(1);

  if (q1 <= 0.0) {
    out.kind = StepKind::kOption1;
    axpy(gamma, image1, state.theta);
  } else if (q2 <= 0.0) {
    out.kind = StepKind::kOption2;
    axpy(gamma, image2, state.theta);
  } else {
    return out;
  }
  add_noise(state, noise);
  finish_step(state, "two_sample_step");
  return out;
}

StepOutcome generalized_perceptron_step(IterateState& state, const std::vector<MultiLinearMap>& maps,
                                        double gamma) {
  if (maps.empty()) throw DimensionError("generalized_perceptron_step: no maps");
  const double nt = norm(state.theta);
  if (nt == 0.0) throw DomainError("generalized_perceptron_step: zero iterate");
  const double depth = static_cast<double>(maps.front().depth());
  const double gamma_t = gamma / std::pow(nt, depth - 1.0);

  StepOutcome out;
  std::vector<RealVector> grads;
  for (std::size_t i = 0; i < maps.size(); ++i) {
    const double h = maps[i].value(state.theta);
    out.dot_products.push_back(h);
    if (h <= 0.0) {
      out.violated.push_back(i);
      grads.push_back(maps[i].grad(state.theta));
    }
  }
  if (out.violated.empty()) return out;
  out.kind = StepKind::kMulti;
  const double scale = gamma_t / static_cast<double>(maps.size());
  for (const RealVector& g : grads) axpy(scale, g, state.theta);
  finish_step(state, "generalized_perceptron_step");
  return out;
}

bool step_size_exceeds_limit(const std::vector<ConvOperator>& operators, double gamma) {
  double worst = 0.0;
  for (const ConvOperator& op : operators) worst = std::max(worst, norm_bounds(op).estimate);
  return worst > 0.0 && gamma >= 1.0 / worst;
}

RunResult run_until(IterateState state, const StepFunction& step, const StopRule& rule,
                    const RunMeta& meta) {
  if (rule.max_iters < 1) throw DomainError("run_until: max_iters must be >= 1");
  if (rule.trace_stride < 1) throw DomainError("run_until: trace_stride must be >= 1");

  RunResult result{std::move(state), {}};
  IterateState& s = result.state;
  long unchanged = 0;

  const auto record = [&](const StepOutcome& outcome, long t, double theta_norm) {
    TraceRecord r;
    r.run_id = meta.run_id;
    r.algo = meta.algo;
    r.t = t;
    double loss = 0.0;
    std::size_t positive = 0;
    for (double dp : outcome.dot_products) {
      loss += logistic(dp);
      if (dp > 0.0) ++positive;
    }
    const double n = static_cast<double>(outcome.dot_products.size());
    r.loss = n > 0 ? loss / n : 0.0;
    r.accuracy = n > 0 ? static_cast<double>(positive) / n : 0.0;
    r.iterate_norm = theta_norm;
    r.violated_count = outcome.violated.size();
    r.corr_mu_plus = outcome.corr_mu_plus;
    r.step_kind = to_string(outcome.kind);
    r.step_size = meta.step_size;
    result.trace.push_back(std::move(r));
  };

  while (!s.stopped) {
    const long t = s.t;
    const double theta_norm = rule.record_trace ? norm(s.theta) : 0.0;
    const RealVector before = rule.stall_window > 0 ? s.theta : RealVector{};
    const StepOutcome outcome = step(s);
    const bool separated = outcome.kind == StepKind::kStop;
    const bool last = separated || s.t >= rule.max_iters;

    if (rule.stall_window > 0 && !separated) {
      unchanged = s.theta == before ? unchanged + 1 : 0;
    }
    const bool stalled = rule.stall_window > 0 && unchanged >= rule.stall_window;

    if (rule.record_trace &&
        (t < rule.dense_trace_until || t % rule.trace_stride == 0 || last || stalled)) {
      record(outcome, t, theta_norm);
    }
    if (separated) {
      s.stopped = true;
      s.stop_reason = StopReason::kSeparated;
    } else if (stalled) {
      s.stopped = true;
      s.stop_reason = StopReason::kStalled;
    } else if (s.t >= rule.max_iters) {
      s.stopped = true;
      s.stop_reason = StopReason::kMaxIters;
    }
  }
  return result;
}

}  // namespace pdx
