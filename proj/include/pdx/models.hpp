#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "pdx/dataset.hpp"
#include "pdx/dense.hpp"
#include "pdx/operators.hpp"
#include "pdx/rng.hpp"
#include "pdx/vector.hpp"

namespace pdx {

enum class ModelKind { kLinear, kConv, kTwoLayer, kMultiLayer };

const char* to_string(ModelKind kind);

// Shape of a model family. Packed parameter layouts:
//   linear     [v (d)]
//   conv(k)    [c (k); v (d)]
//   two_layer  [vec(C) (f*d, column-major); v (f)]
//   multi      [vec(C_1); ...; vec(C_l); v (f_1)], layer_dims = (f_1, ..., f_l, d)
struct ModelSpec {
  ModelKind kind = ModelKind::kLinear;
  std::size_t d = 0;
  std::size_t k = 0;                    // conv only
  std::size_t f = 0;                    // two_layer only
  std::vector<std::size_t> layer_dims;  // multi only

  static ModelSpec linear(std::size_t d);
  static ModelSpec conv(std::size_t d, std::size_t k);
  static ModelSpec two_layer(std::size_t d, std::size_t f);
  static ModelSpec multi_layer(std::vector<std::size_t> layer_dims);

  std::size_t packed_size() const;
  // Polynomial degree of m(b; w) in w: 1 for linear, l+1 otherwise.
  std::size_t degree() const;
  std::string describe() const;
};

struct ModelParams {
  ModelParams(ModelSpec spec, RealVector w);

  ModelSpec spec;
  RealVector w;
};

// m(b; w). Prediction is sign(m).
double model_eval(const ModelParams& params, const RealVector& b);

// Gradient in w of y * m(b; w), i.e. A_i w for the structured models.
RealVector signed_model_grad(const ModelParams& params, const RealVector& signed_feature);

// log(1 + exp(-t)) without overflow.
double logistic(double t) noexcept;
// 1 / (1 + exp(t)) without overflow.
double sigmoid_neg(double t) noexcept;

struct LossReport {
  double loss = 0.0;
  double accuracy = 0.0;
  bool separated = false;
  std::vector<double> margins;  // y_i m(b_i; w)
};

// Margins <= 0 count as misclassified.
LossReport logistic_loss(const ModelParams& params, const Dataset& data);

// grad f(w) for f(w) = (1/n) sum_i log(1 + exp(-y_i m(b_i; w))).
RealVector loss_gradient(const ModelParams& params, const Dataset& data);

// w - gamma grad f(w). Each throws NumericError (with `iteration` when
// given) if the new iterate is not finite.
ModelParams gd_step_linear(const ModelParams& params, const Dataset& data, double gamma,
                           long iteration = -1);
ModelParams gd_step_conv(const ModelParams& params, const Dataset& data, double gamma,
                         long iteration = -1);
ModelParams gd_step_two_layer(const ModelParams& params, const Dataset& data, double gamma,
                              long iteration = -1);
// With normalized = true the step is gamma / ||w||^{l-1}; ||w|| = 0 is then
// a DomainError.
ModelParams gd_step_multilayer(const ModelParams& params, const Dataset& data, double gamma,
                               bool normalized = false, long iteration = -1);
// Dispatch on params.spec.kind (multi-layer un-normalized).
ModelParams gd_step(const ModelParams& params, const Dataset& data, double gamma,
                    long iteration = -1);

struct HessianProbe {
  RealVector w;
  DenseMatrix hessian;
  double hessian_norm_lb = 0.0;  // power-iteration estimate, never above the true norm
  double grad_norm = 0.0;
  double loss = 0.0;
};

// Dense Hessian of the conv-model loss:
//   (1/n) sum_i [ -s_i A_i + s_i (1 - s_i) A_i w w^T A_i ],  s_i = 1/(1 + exp(w^T A_i w / 2)).
HessianProbe hessian_probe(const ModelParams& params, const Dataset& data,
                           std::size_t cap = kDefaultDenseCap);

// v_bar = sum_j c_j (P^j)^T v, so that m_cv(b; c, v) = m_lin(b; v_bar).
RealVector linear_equivalent(const ModelParams& conv_params);

// One-sample dataset b = ones(d)/sqrt(d), y = +1, and a draw from
// K = {alpha v1 + beta v2 : 0 <= beta <= alpha <= sqrt(beta^2 + 1)} with
// beta ~ U[0, 5], alpha ~ U[beta, sqrt(beta^2 + 1)]; v1, v2 are the unit
// eigenvectors of A_1 for +-sqrt(2).
Dataset hessian_example_dataset(std::size_t d);
RealVector sample_hessian_region(std::size_t d, Rng& rng);

}  // namespace pdx
