#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pdx/jacobi.hpp"
#include "pdx/models.hpp"
#include "pdx/spectral.hpp"
#include "support/oracles.hpp"

using namespace pdx;

namespace {

Dataset random_dataset(Rng& rng, std::size_t d, std::size_t n) {
  std::vector<Sample> samples;
  for (std::size_t i = 0; i < n; ++i) samples.push_back({rng.normal_vector(d), rng.uniform() < 0.5 ? -1 : 1});
  return Dataset("random", std::move(samples));
}

// Independent loss oracle: evaluates the model through oracle:: helpers only.
double oracle_loss(const ModelSpec& spec, const Dataset& data, const oracle::Vec& w) {
  double total = 0.0;
  for (const Sample& s : data.samples()) {
    double m = 0.0;
    switch (spec.kind) {
      case ModelKind::kLinear:
        for (std::size_t i = 0; i < spec.d; ++i) m += w[i] * s.b[i];
        break;
      case ModelKind::kConv: {
        const oracle::Vec c(w.begin(), w.begin() + static_cast<long>(spec.k));
        const oracle::Vec cb = oracle::conv(c, s.b.values());
        for (std::size_t i = 0; i < spec.d; ++i) m += cb[i] * w[spec.k + i];
        break;
      }
      case ModelKind::kTwoLayer: m = oracle::two_layer_model(w, s.b.values(), spec.f); break;
      case ModelKind::kMultiLayer: m = oracle::deep_model(w, s.b.values(), spec.layer_dims); break;
    }
    total += oracle::softplus_neg(s.y * m);
  }
  return total / static_cast<double>(data.size());
}

void check_step_against_fd(const ModelSpec& spec, Rng& rng, int instances) {
  for (int trial = 0; trial < instances; ++trial) {
    const std::size_t n = 1 + rng.below(8);
    const Dataset data = random_dataset(rng, spec.d, n);
    const ModelParams params(spec, rng.normal_vector(spec.packed_size(), 0.7));
    const double gamma = 0.3;
    const ModelParams next = gd_step(params, data, gamma);
    oracle::Vec step(next.w.size());
    for (std::size_t i = 0; i < step.size(); ++i) step[i] = (params.w[i] - next.w[i]) / gamma;
    const oracle::Vec fd = oracle::central_gradient(
        [&](const oracle::Vec& w) { return oracle_loss(spec, data, w); }, params.w.values());
    CHECK(oracle::rel_error(step, fd) <= 1e-6);
  }
}

}  // namespace

TEST_CASE("model spec packing") {
  CHECK(ModelSpec::linear(5).packed_size() == 5);
  CHECK(ModelSpec::conv(5, 3).packed_size() == 8);
  CHECK(ModelSpec::two_layer(5, 2).packed_size() == 12);
  CHECK(ModelSpec::multi_layer({2, 3, 4}).packed_size() == 6 + 12 + 2);
  CHECK_THROWS_AS(ModelParams(ModelSpec::conv(5, 2), RealVector::zeros(6)), DimensionError);
  CHECK_THROWS_AS(ModelSpec::conv(3, 4), DomainError);
}

TEST_CASE("model_eval") {
  Rng rng(1);
  const RealVector b = rng.normal_vector(5);
  CHECK(model_eval(ModelParams(ModelSpec::linear(5), b), b) == doctest::Approx(dot(b, b)));
  const RealVector v = rng.normal_vector(5);
  std::vector<double> packed{1.0, 0.0};
  packed.insert(packed.end(), v.begin(), v.end());
  const ModelParams identity_kernel(ModelSpec::conv(5, 2), RealVector(packed));
  CHECK(model_eval(identity_kernel, b) == doctest::Approx(dot(v, b)).epsilon(1e-14));
  const ModelParams conv(ModelSpec::conv(5, 2), rng.normal_vector(7));
  CHECK(model_eval(conv, b) == doctest::Approx(ConvOperator(b, 2).quadratic_form(conv.w)).epsilon(1e-14));
  CHECK_THROWS_AS(model_eval(conv, rng.normal_vector(4)), DimensionError);
}

TEST_CASE("logistic loss") {
  CHECK(logistic(0.5) == doctest::Approx(0.474077).epsilon(1e-6));
  CHECK(logistic(-800.0) == doctest::Approx(800.0));
  CHECK(logistic(1e4) >= 0.0);
  CHECK(logistic(1e4) < 1e-300);
  CHECK(sigmoid_neg(0.0) == 0.5);
  CHECK(sigmoid_neg(-1e4) == 1.0);
  CHECK(sigmoid_neg(1e4) == 0.0);

  const Dataset data = make_two_sample(4, 0.3);
  const LossReport zero = logistic_loss(ModelParams(ModelSpec::conv(4, 2), RealVector::zeros(6)), data);
  CHECK(zero.loss == doctest::Approx(std::log(2.0)));
  CHECK(zero.accuracy == 0.0);
  CHECK_FALSE(zero.separated);

  const Dataset single("single", {Sample{RealVector{1.0}, 1}});
  const LossReport half = logistic_loss(ModelParams(ModelSpec::linear(1), RealVector{0.5}), single);
  CHECK(half.loss == doctest::Approx(0.474077).epsilon(1e-6));
  const LossReport big = logistic_loss(ModelParams(ModelSpec::linear(1), RealVector{1e4}), single);
  CHECK(big.separated);
  CHECK(big.loss < 1e-300);
}

TEST_CASE("gd steps match central finite differences") {
  Rng rng(2024);
  check_step_against_fd(ModelSpec::linear(1 + rng.below(10)), rng, 50);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t d = 3 + rng.below(8);
    check_step_against_fd(ModelSpec::conv(d, 2 + rng.below(2)), rng, 1);
    check_step_against_fd(ModelSpec::two_layer(d, 1 + rng.below(3)), rng, 1);
    check_step_against_fd(ModelSpec::multi_layer({1 + rng.below(3), 1 + rng.below(3), d}), rng, 1);
  }
}

TEST_CASE("gd step special cases") {
  Rng rng(3);
  const Dataset data = random_dataset(rng, 5, 4);
  const ModelParams zero(ModelSpec::conv(5, 2), RealVector::zeros(7));
  CHECK(gd_step_conv(zero, data, 0.5).w == zero.w);

  const ModelParams zero_multi(ModelSpec::multi_layer({2, 2, 5}), RealVector::zeros(16));
  CHECK(gd_step_multilayer(zero_multi, data, 0.5).w == zero_multi.w);
  CHECK_THROWS_AS(gd_step_multilayer(zero_multi, data, 0.5, true), DomainError);

  SUBCASE("linear first step from zero") {
    const ModelParams lin(ModelSpec::linear(5), RealVector::zeros(5));
    const double gamma = 0.8;
    RealVector want(5);
    for (std::size_t i = 0; i < data.size(); ++i) axpy(gamma / (2.0 * 4.0), data.signed_feature(i), want);
    CHECK(oracle::rel_error(gd_step_linear(lin, data, gamma).w.values(), want.values()) < 1e-15);
    const Dataset balanced("balanced", {Sample{RealVector{1, 2}, 1}, Sample{RealVector{1, 2}, -1}});
    CHECK(norm(gd_step_linear(ModelParams(ModelSpec::linear(2), RealVector::zeros(2)), balanced, 1.0).w) == 0.0);
  }
  SUBCASE("eigenray reduces to a scalar recursion") {
    const Dataset one("one", {Sample{rng.normal_vector(6), 1}});
    const EigenSystem sys = eigensystem_k2(one.signed_feature(0));
    for (const EigenPair& p : sys.pairs) {
      const ModelParams w(ModelSpec::conv(6, 2), p.unit);
      const double gamma = 0.2;
      const RealVector want = (1.0 + gamma * p.value / (1.0 + std::exp(p.value / 2))) * p.unit;
      CHECK(oracle::rel_error(gd_step_conv(w, one, gamma).w.values(), want.values()) < 1e-12);
    }
  }
  SUBCASE("depth one multi-layer equals the two-layer step") {
    const RealVector w = rng.normal_vector(3 * 5 + 3);
    const ModelParams multi(ModelSpec::multi_layer({3, 5}), w);
    const ModelParams two(ModelSpec::two_layer(5, 3), w);
    CHECK(oracle::rel_error(gd_step_multilayer(multi, data, 0.4).w.values(),
                            gd_step_two_layer(two, data, 0.4).w.values()) < 1e-13);
  }
  SUBCASE("normalized multi-layer scales gamma by the norm") {
    const ModelParams multi(ModelSpec::multi_layer({2, 3, 5}), rng.normal_vector(2 * 3 + 3 * 5 + 2));
    const double nw = norm(multi.w);
    CHECK(oracle::rel_error(gd_step_multilayer(multi, data, 0.4, true).w.values(),
                            gd_step_multilayer(multi, data, 0.4 / nw).w.values()) < 1e-15);
  }
  CHECK_THROWS_AS(gd_step_linear(zero, data, 0.1), DomainError);
  CHECK_THROWS_AS(gd_step_conv(zero, data, 0.0), DomainError);
}

TEST_CASE("non-finite iterate is reported with the iteration") {
  const Dataset data("huge", {Sample{RealVector{1e300, 1e300}, -1}});
  const ModelParams w(ModelSpec::linear(2), RealVector{1e300, 1e300});
  try {
    gd_step_linear(w, data, 1e300, 17);
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    CHECK(e.iteration() == 17);
  }
}

TEST_CASE("reparameterization and homogeneity") {
  Rng rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t d = 4 + rng.below(6);
    const std::size_t k = 2 + rng.below(d - 1);
    const ModelParams conv(ModelSpec::conv(d, k), rng.normal_vector(d + k));
    const ModelParams lin(ModelSpec::linear(d), linear_equivalent(conv));
    for (int s = 0; s < 10; ++s) {
      const RealVector b = rng.normal_vector(d);
      CHECK(model_eval(conv, b) == doctest::Approx(model_eval(lin, b)).epsilon(1e-12));
      const ModelParams scaled(conv.spec, 3.5 * conv.w);
      CHECK(std::signbit(model_eval(scaled, b)) == std::signbit(model_eval(conv, b)));
    }
  }
}

TEST_CASE("hessian probe") {
  SUBCASE("w = 0 single sample gives half the operator") {
    Rng rng(5);
    const Dataset one("one", {Sample{rng.normal_vector(6), 1}});
    const HessianProbe probe = hessian_probe(ModelParams(ModelSpec::conv(6, 2), RealVector::zeros(8)), one);
    const double op_norm = norm_bounds(ConvOperator(one.signed_feature(0), 2)).estimate;
    CHECK(probe.hessian_norm_lb == doctest::Approx(0.5 * op_norm).epsilon(1e-7));
    CHECK(probe.loss == doctest::Approx(std::log(2.0)));
    CHECK(probe.grad_norm == 0.0);
  }
  SUBCASE("hessian matches finite differences of the gradient") {
    Rng rng(6);
    const Dataset data = random_dataset(rng, 4, 3);
    const ModelParams params(ModelSpec::conv(4, 2), rng.normal_vector(6, 0.8));
    const HessianProbe probe = hessian_probe(params, data);
    for (std::size_t col = 0; col < 6; ++col) {
      const oracle::Vec fd = oracle::central_gradient(
          [&](const oracle::Vec& w) {
            return loss_gradient(ModelParams(params.spec, RealVector(w)), data)[col];
          },
          params.w.values());
      CHECK(oracle::rel_error(probe.hessian.column(col).values(), fd) < 1e-6);
    }
    const SymmetricEigen eig = dense_symmetric_eig(probe.hessian);
    const double true_norm = std::max(std::abs(eig.values[0]), std::abs(eig.values[5]));
    CHECK(probe.hessian_norm_lb <= true_norm * (1 + 1e-12));
    CHECK(probe.hessian_norm_lb == doctest::Approx(true_norm).epsilon(1e-6));
  }
  SUBCASE("one-sample region bounds") {
    Rng rng(7);
    const std::size_t d = 16;
    const Dataset data = hessian_example_dataset(d);
    CHECK(norm(data[0].b) == doctest::Approx(1.0));
    for (int trial = 0; trial < 100; ++trial) {
      const RealVector w = sample_hessian_region(d, rng);
      const HessianProbe probe = hessian_probe(ModelParams(ModelSpec::conv(d, 2), w), data);
      const double nw = norm(w);
      CHECK(probe.hessian_norm_lb >= nw * nw / 20.0 - std::sqrt(2.0));
      CHECK(probe.grad_norm >= std::sqrt(2.0) / 20.0 * nw);
      CHECK(probe.grad_norm <= std::sqrt(2.0) * nw);
      CHECK(probe.loss >= 1.0 / 20.0);
      CHECK(probe.loss <= 5.0);
    }
  }
  CHECK_THROWS_AS(hessian_probe(ModelParams(ModelSpec::linear(3), RealVector::zeros(3)),
                                make_two_sample(3, 0.1)),
                  DomainError);
}

TEST_CASE("loss decreases for small steps near the origin") {
  Rng rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const Dataset data = random_dataset(rng, 5, 4);
    ModelParams params(ModelSpec::conv(5, 2), rng.normal_vector(7, 0.1));
    const double lemp = hessian_probe(params, data).hessian_norm_lb;
    const double gamma = 0.5 / std::max(lemp, 1.0);
    double prev = logistic_loss(params, data).loss;
    for (int t = 0; t < 5; ++t) {
      params = gd_step_conv(params, data, gamma);
      const double now = logistic_loss(params, data).loss;
      CHECK(now <= prev + 1e-15);
      prev = now;
    }
  }
}
