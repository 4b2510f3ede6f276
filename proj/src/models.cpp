#include "pdx/models.hpp"

#include <cmath>

#include "pdx/spectral.hpp"

namespace pdx {

const char* to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::kLinear: return "linear";
    case ModelKind::kConv: return "conv";
    case ModelKind::kTwoLayer: return "two_layer";
    case ModelKind::kMultiLayer: return "multi_layer";
  }
  return "?";
}

ModelSpec ModelSpec::linear(std::size_t d) {
  if (d == 0) throw DimensionError("linear model: d must be positive");
  return ModelSpec{ModelKind::kLinear, d, 0, 0, {}};
}

ModelSpec ModelSpec::conv(std::size_t d, std::size_t k) {
  if (k < 2) throw DomainError("conv model: kernel size must be >= 2");
  if (k > d) throw DomainError("conv model: kernel size exceeds d");
  return ModelSpec{ModelKind::kConv, d, k, 0, {}};
}

ModelSpec ModelSpec::two_layer(std::size_t d, std::size_t f) {
  if (d == 0 || f == 0) throw DimensionError("two-layer model: d and f must be positive");
  return ModelSpec{ModelKind::kTwoLayer, d, 0, f, {}};
}

ModelSpec ModelSpec::multi_layer(std::vector<std::size_t> layer_dims) {
  if (layer_dims.size() < 2) throw DimensionError("multi-layer model: need (f_1, ..., f_l, d)");
  for (std::size_t n : layer_dims) {
    if (n == 0) throw DimensionError("multi-layer model: zero layer width");
  }
  const std::size_t d = layer_dims.back();
  return ModelSpec{ModelKind::kMultiLayer, d, 0, 0, std::move(layer_dims)};
}

std::size_t ModelSpec::packed_size() const {
  switch (kind) {
    case ModelKind::kLinear: return d;
    case ModelKind::kConv: return d + k;
    case ModelKind::kTwoLayer: return f * d + f;
    case ModelKind::kMultiLayer: {
      std::size_t total = layer_dims.front();
      for (std::size_t j = 0; j + 1 < layer_dims.size(); ++j) total += layer_dims[j] * layer_dims[j + 1];
      return total;
    }
  }
  return 0;
}

std::size_t ModelSpec::degree() const {
  switch (kind) {
    case ModelKind::kLinear: return 1;
    case ModelKind::kConv:
    case ModelKind::kTwoLayer: return 2;
    case ModelKind::kMultiLayer: return layer_dims.size();
  }
  return 0;
}

std::string ModelSpec::describe() const {
  switch (kind) {
    case ModelKind::kLinear: return "linear(d=" + std::to_string(d) + ")";
    case ModelKind::kConv: return "conv(d=" + std::to_string(d) + ",k=" + std::to_string(k) + ")";
    case ModelKind::kTwoLayer:
      return "two_layer(d=" + std::to_string(d) + ",f=" + std::to_string(f) + ")";
    case ModelKind::kMultiLayer: {
      std::string s = "multi_layer(";
      for (std::size_t j = 0; j < layer_dims.size(); ++j) {
        if (j) s += ",";
        s += std::to_string(layer_dims[j]);
      }
      return s + ")";
    }
  }
  return "?";
}

ModelParams::ModelParams(ModelSpec s, RealVector weights) : spec(std::move(s)), w(std::move(weights)) {
  if (w.size() != spec.packed_size()) {
    throw DimensionError("ModelParams: " + spec.describe() + " expects " +
                         std::to_string(spec.packed_size()) + " parameters, got " +
                         std::to_string(w.size()));
  }
}

namespace {

void check_feature(const ModelParams& params, const RealVector& b) {
  if (b.size() != params.spec.d) {
    throw DimensionError("model: feature has dimension " + std::to_string(b.size()) +
                         ", model expects " + std::to_string(params.spec.d));
  }
}

void check_dataset(const ModelParams& params, const Dataset& data) {
  if (data.dim() != params.spec.d) {
    throw DimensionError("model: dataset '" + data.name() + "' has d=" + std::to_string(data.dim()) +
                         ", model expects " + std::to_string(params.spec.d));
  }
}

ModelParams descend(const ModelParams& params, const Dataset& data, double gamma, long iteration) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw DomainError("gd_step: gamma must be > 0");
  const RealVector grad = loss_gradient(params, data);
  std::vector<double> next(params.w.begin(), params.w.end());
  axpy(-gamma, grad.span(), next);
  if (!all_finite(next)) throw NumericError("gd_step: non-finite iterate", iteration);
  return ModelParams(params.spec, RealVector(std::move(next)));
}

void require_kind(const ModelParams& params, ModelKind kind, const char* what) {
  if (params.spec.kind != kind) {
    throw DomainError(std::string(what) + ": model is " + to_string(params.spec.kind));
  }
}

}  // namespace

double model_eval(const ModelParams& params, const RealVector& b) {
  check_feature(params, b);
  const ModelSpec& s = params.spec;
  switch (s.kind) {
    case ModelKind::kLinear: return dot(params.w, b);
    case ModelKind::kConv: return ConvOperator(b, s.k).quadratic_form(params.w);
    case ModelKind::kTwoLayer: return TwoLayerOperator(b, s.f).quadratic_form(params.w);
    case ModelKind::kMultiLayer: return MultiLinearMap(s.layer_dims, b).value(params.w);
  }
  return 0.0;
}

RealVector signed_model_grad(const ModelParams& params, const RealVector& a) {
  check_feature(params, a);
  const ModelSpec& s = params.spec;
  switch (s.kind) {
    case ModelKind::kLinear: return a;
    case ModelKind::kConv: return ConvOperator(a, s.k).apply(params.w);
    case ModelKind::kTwoLayer: return TwoLayerOperator(a, s.f).apply(params.w);
    case ModelKind::kMultiLayer: return MultiLinearMap(s.layer_dims, a).grad(params.w);
  }
  return {};
}

double logistic(double t) noexcept {
  return t >= 0.0 ? std::log1p(std::exp(-t)) : -t + std::log1p(std::exp(t));
}

double sigmoid_neg(double t) noexcept {
  if (t >= 0.0) {
    const double e = std::exp(-t);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(t));
}

LossReport logistic_loss(const ModelParams& params, const Dataset& data) {
  check_dataset(params, data);
  LossReport report;
  report.margins.reserve(data.size());
  std::size_t correct = 0;
  double total = 0.0;
  for (const Sample& s : data.samples()) {
    const double margin = static_cast<double>(s.y) * model_eval(params, s.b);
    report.margins.push_back(margin);
    total += logistic(margin);
    if (margin > 0.0) ++correct;
  }
  const double n = static_cast<double>(data.size());
  report.loss = total / n;
  report.accuracy = static_cast<double>(correct) / n;
  report.separated = correct == data.size();
  return report;
}

RealVector loss_gradient(const ModelParams& params, const Dataset& data) {
  check_dataset(params, data);
  RealVector grad(params.w.size());
  const double n = static_cast<double>(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const RealVector a = data.signed_feature(i);
    const RealVector g = signed_model_grad(params, a);
    // y m(b; w) = <g, w> / degree by Euler's identity for homogeneous m.
    const double margin = dot(g, params.w) / static_cast<double>(params.spec.degree());
    axpy(-sigmoid_neg(margin) / n, g, grad);
  }
  return grad;
}

ModelParams gd_step_linear(const ModelParams& params, const Dataset& data, double gamma, long iteration) {
  require_kind(params, ModelKind::kLinear, "gd_step_linear");
  return descend(params, data, gamma, iteration);
}

ModelParams gd_step_conv(const ModelParams& params, const Dataset& data, double gamma, long iteration) {
  require_kind(params, ModelKind::kConv, "gd_step_conv");
  return descend(params, data, gamma, iteration);
}

ModelParams gd_step_two_layer(const ModelParams& params, const Dataset& data, double gamma,
                              long iteration) {
  require_kind(params, ModelKind::kTwoLayer, "gd_step_two_layer");
  return descend(params, data, gamma, iteration);
}

ModelParams gd_step_multilayer(const ModelParams& params, const Dataset& data, double gamma,
                               bool normalized, long iteration) {
  require_kind(params, ModelKind::kMultiLayer, "gd_step_multilayer");
  if (!normalized) return descend(params, data, gamma, iteration);
  const double nw = norm(params.w);
  if (nw == 0.0) throw DomainError("gd_step_multilayer: normalized step at w = 0");
  const double depth = static_cast<double>(params.spec.layer_dims.size() - 1);
  return descend(params, data, gamma / std::pow(nw, depth - 1.0), iteration);
}

ModelParams gd_step(const ModelParams& params, const Dataset& data, double gamma, long iteration) {
  return descend(params, data, gamma, iteration);
}

HessianProbe hessian_probe(const ModelParams& params, const Dataset& data, std::size_t cap) {
  require_kind(params, ModelKind::kConv, "hessian_probe");
  check_dataset(params, data);
  const std::size_t dim = params.w.size();
  if (dim > cap) throw DomainError("hessian_probe: dimension above the dense cap");

  HessianProbe probe;
  probe.w = params.w;
  probe.hessian = DenseMatrix(dim, dim);
  const double n = static_cast<double>(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const ConvOperator op(data.signed_feature(i), params.spec.k);
    const RealVector aw = op.apply(params.w);
    const double s = sigmoid_neg(0.5 * dot(params.w, aw));
    DenseMatrix term = op.materialize(cap);
    term *= -s / n;
    DenseMatrix rank_one = outer(aw, aw);
    rank_one *= s * (1.0 - s) / n;
    term += rank_one;
    probe.hessian += term;
  }
  probe.hessian_norm_lb = power_norm(probe.hessian).estimate;
  probe.grad_norm = norm(loss_gradient(params, data));
  probe.loss = logistic_loss(params, data).loss;
  return probe;
}

RealVector linear_equivalent(const ModelParams& params) {
  require_kind(params, ModelKind::kConv, "linear_equivalent");
  const std::size_t k = params.spec.k;
  const std::size_t d = params.spec.d;
  RealVector out(d);
  // (P^j)^T v is a left shift by j: ((P^j)^T v)_i = v_{(i + j) mod d}.
  for (std::size_t j = 0; j < k; ++j) {
    const double c = params.w[j];
    for (std::size_t i = 0; i < d; ++i) out[i] += c * params.w[k + (i + j) % d];
  }
  return out;
}

Dataset hessian_example_dataset(std::size_t d) {
  if (d < 2) throw DomainError("hessian_example_dataset: d must be >= 2");
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  return Dataset("one-sample(d=" + std::to_string(d) + ")", {Sample{scale * RealVector::ones(d), 1}});
}

RealVector sample_hessian_region(std::size_t d, Rng& rng) {
  const Dataset data = hessian_example_dataset(d);
  const EigenSystem sys = eigensystem_k2(data.signed_feature(0));
  const double beta = rng.uniform(0.0, 5.0);
  const double alpha = rng.uniform(beta, std::sqrt(beta * beta + 1.0));
  RealVector w = alpha * sys.pairs.at(0).unit;
  axpy(beta, sys.pairs.at(1).unit, w);
  return w;
}

}  // namespace pdx
